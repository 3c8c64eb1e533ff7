"""Finite-difference spectral oracle for the operator family.

The operator A_z u = -(P u' + Q u)' + Q^T u' + (S + C_z) u on (0, length) with
Dirichlet conditions is discretized in conservative form with second-order
central differences on m interior nodes, h = length / (m + 1).  Eigenvalues of
the resulting dense m*n matrix provide an independent reference for the Morse
index and for spectral-flow counts along homotopy paths.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateOperatorError, MatchingAmbiguityError
from .problem import ProblemSpec, Rectangle, require_valid

DEFAULT_GRID_CAP = 1600
DEFAULT_GRID_FLOOR = 200
GRID_POINTS_PER_UNIT = 400
GAP_TOL_FACTOR = 10.0
DEFAULT_PATH_STEPS = 48
MATCH_REFINE_DEPTH = 12
CLUSTER_REL_TOL = 1e-7


def default_grid_size(spec: ProblemSpec) -> int:
    m = int(round(GRID_POINTS_PER_UNIT * spec.length))
    return int(np.clip(m, DEFAULT_GRID_FLOOR, DEFAULT_GRID_CAP))


def discretize(spec: ProblemSpec, t: float = 0.0, s: float = 0.0,
               m: int | None = None) -> np.ndarray:
    """Dense (m*n) x (m*n) matrix; real when s = 0, complex otherwise."""
    if m is None:
        m = default_grid_size(spec)
    n = spec.n
    h = spec.length / (m + 1)
    xs = h * np.arange(1, m + 1)
    p_half = spec.p.eval_many(h * (np.arange(m + 1) + 0.5))   # P at x_{i+1/2}
    qs = spec.q.eval_many(np.concatenate(([0.0], xs, [spec.length])))
    zo = spec.zero_order(xs, t, s)

    dtype = complex if s != 0.0 else float
    a = np.zeros((m * n, m * n), dtype=dtype)
    inv_h2 = 1.0 / (h * h)
    inv_2h = 1.0 / (2.0 * h)
    for i in range(m):
        r = slice(i * n, (i + 1) * n)
        a[r, r] = (p_half[i] + p_half[i + 1]) * inv_h2 + zo[i]
        qt_i = qs[i + 1].T
        if i + 1 < m:
            a[r, (i + 1) * n:(i + 2) * n] = (-p_half[i + 1] * inv_h2
                                             - qs[i + 2] * inv_2h + qt_i * inv_2h)
        if i > 0:
            a[r, (i - 1) * n:i * n] = (-p_half[i] * inv_h2
                                       + qs[i] * inv_2h - qt_i * inv_2h)
    return a


def eigenvalues(spec: ProblemSpec, t: float = 0.0, s: float = 0.0,
                m: int | None = None) -> np.ndarray:
    a = discretize(spec, t, s, m)
    if a.dtype == float and np.allclose(a, a.T, atol=1e-12 * (1 + np.max(np.abs(a)))):
        return np.sort(scipy.linalg.eigvalsh(a)).astype(complex)
    eigs = scipy.linalg.eigvals(a)
    return eigs[np.lexsort((eigs.imag, eigs.real))]


def _gap_tolerance(spec: ProblemSpec, m: int, lam: float) -> float:
    h = spec.length / (m + 1)
    return GAP_TOL_FACTOR * h * h * max(1.0, abs(lam))


def morse_index(spec: ProblemSpec, t: float = 0.0, m: int | None = None,
                check: bool = True) -> int:
    """Number of negative eigenvalues of the selfadjoint operator at (t, s=0).

    Raises DegenerateOperatorError when an eigenvalue sits inside the
    discretization error band around zero, or when the count is unstable
    under grid coarsening.
    """
    require_valid(spec, require_positive=True)
    if m is None:
        m = default_grid_size(spec)
    eigs = eigenvalues(spec, t, 0.0, m).real
    closest = float(np.min(np.abs(eigs)))
    if closest < _gap_tolerance(spec, m, closest):
        raise DegenerateOperatorError(
            f"eigenvalue {closest:.3e} within the discretization band around zero")
    count = int(np.sum(eigs < 0))
    if check and m >= 2 * DEFAULT_GRID_FLOOR:
        coarse = int(np.sum(eigenvalues(spec, t, 0.0, m // 2).real < 0))
        if coarse != count:
            raise DegenerateOperatorError(
                f"negative-eigenvalue count unstable under refinement "
                f"({coarse} at m={m // 2}, {count} at m={m})")
    return count


@dataclass(frozen=True)
class CrossingEvent:
    t: float
    imag: float
    direction: int  # +1 left-to-right, -1 right-to-left


@dataclass(frozen=True)
class CrossingLedger:
    events: tuple
    net: int
    ts: np.ndarray
    snapshots: np.ndarray  # (len(ts), n_eigs) complex, rows matched across t

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            n_eig = self.snapshots.shape[1]
            w.writerow(["t"] + [f"eig{j}_{p}" for j in range(n_eig)
                                for p in ("re", "im")])
            for i, t in enumerate(self.ts):
                row = [t]
                for e in self.snapshots[i]:
                    row += [e.real, e.imag]
                w.writerow(row)


def _match(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    cost = np.abs(prev[:, None] - cur[None, :])
    _, cols = linear_sum_assignment(cost)
    return cur[cols]


def _min_gap(eigs: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(eigs))))
    vals = np.sort_complex(eigs)
    gaps = np.abs(np.diff(vals))
    gaps = gaps[gaps > CLUSTER_REL_TOL * scale]
    return float(np.min(gaps)) if gaps.size else np.inf


def spectral_flow(spec: ProblemSpec, t0: float = 0.0, t1: float = 1.0,
                  path_steps: int = DEFAULT_PATH_STEPS, m: int | None = None,
                  track: int | None = None) -> CrossingLedger:
    """Net signed count of eigenvalue crossings of the imaginary axis.

    Eigenvalues are continued along t by nearest-neighbor assignment between
    consecutive snapshots; the step is bisected until every matched move is
    smaller than half the smallest distinct gap.  A left-to-right crossing
    (Re passes - to +) counts +1.
    """
    if m is None:
        m = min(default_grid_size(spec), 400)
    if track is None:
        track = spec.n * m

    ts = [float(t0)]
    snaps = [np.sort_complex(eigenvalues(spec, t0, 0.0, m))[:track]
             if track < spec.n * m else eigenvalues(spec, t0, 0.0, m)]

    def snapshot(t: float) -> np.ndarray:
        eigs = eigenvalues(spec, t, 0.0, m)
        return np.sort_complex(eigs)[:track] if track < eigs.size else eigs

    def advance(ta: float, ea: np.ndarray, tb: float, depth: int):
        eb = _match(ea, snapshot(tb))
        moved = float(np.max(np.abs(eb - ea)))
        if moved <= 0.5 * min(_min_gap(ea), _min_gap(eb)):
            return [(tb, eb)]
        if depth == 0:
            raise MatchingAmbiguityError(
                f"eigenvalue matching ambiguous on [{ta:.6g}, {tb:.6g}]")
        tm = 0.5 * (ta + tb)
        first = advance(ta, ea, tm, depth - 1)
        return first + advance(tm, first[-1][1], tb, depth - 1)

    for k in range(path_steps):
        ta = t0 + (t1 - t0) * k / path_steps
        tb = t0 + (t1 - t0) * (k + 1) / path_steps
        for t_new, e_new in advance(ta, snaps[-1], tb, MATCH_REFINE_DEPTH):
            ts.append(t_new)
            snaps.append(e_new)

    snapshots = np.array(snaps)
    events = []
    for j in range(snapshots.shape[1]):
        re = snapshots[:, j].real
        for i in range(len(ts) - 1):
            if re[i] < 0 <= re[i + 1]:
                events.append(CrossingEvent(0.5 * (ts[i] + ts[i + 1]),
                                            float(snapshots[i, j].imag), +1))
            elif re[i] >= 0 > re[i + 1]:
                events.append(CrossingEvent(0.5 * (ts[i] + ts[i + 1]),
                                            float(snapshots[i, j].imag), -1))
    events.sort(key=lambda e: e.t)
    net = sum(e.direction for e in events)
    return CrossingLedger(tuple(events), net, np.array(ts), snapshots)


def check_strip_bound(spec: ProblemSpec, omega: Rectangle, m: int | None = None,
                      t_samples: int = 5) -> float:
    """Smallest |Im| margin between the spectrum and the strip edges s = +-M.

    For the real family at s = 0 all eigenvalue imaginary parts are bounded by
    the zero-order sup norm; this verifies the chosen strip height clears the
    discrete spectrum at a few t values.
    """
    if m is None:
        m = min(default_grid_size(spec), 400)
    margin = np.inf
    for t in np.linspace(omega.t_min, omega.t_max, t_samples):
        eigs = eigenvalues(spec, t, 0.0, m)
        margin = min(margin, omega.s_max - float(np.max(np.abs(eigs.imag))))
    return float(margin)
