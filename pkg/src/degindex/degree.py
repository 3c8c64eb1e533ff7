"""Brouwer degree of a complex-valued map on a rectangle boundary.

The degree is computed as the winding of the boundary restriction: the four
edges are traversed counterclockwise (first coordinate rightward, second
upward), argument increments are accumulated with principal-branch unwrapping,
and any segment whose increment reaches pi/2 is bisected.  The orientation
convention is calibrated so that selfadjoint Dirichlet problems produce
nonnegative local degrees.

Zero admissibility: |f| must stay above a relative tolerance on the whole
trace.  Because |f| can span dozens of decades along a single edge (sinh
growth in the strip), the 1e-9 relative tolerance is applied locally: a sample
is flagged as a boundary zero when its modulus drops at least nine decades
below its immediate neighbors on the trace (for refined midpoints, below the
bracketing pair), or below the absolute floor 1e-300.  Bisection that
exhausts its depth while dipping toward such a level is classified the same
way; exhaustion away from a dip reports non-convergence instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .boundary import DeterminantSample, rho
from .errors import BoundaryZeroError, NonConvergenceError
from .problem import ProblemSpec, Rectangle, default_rectangle

SAMPLES_PER_EDGE = 64
MAX_BISECTION_DEPTH = 24
ZERO_REL_TOL = 1e-9
LOG_ABS_FLOOR = np.log(1e-300)
RESIDUAL_TOL = 0.01
_SPLIT_FRACTIONS = ((0.5, 0.5), (0.53, 0.47), (0.47, 0.53), (0.57, 0.51), (0.43, 0.49))


@dataclass(frozen=True)
class _Sample:
    tau: float
    u: float
    v: float
    log_abs: float
    arg: float


@dataclass(frozen=True)
class BoundaryTrace:
    taus: np.ndarray
    us: np.ndarray
    vs: np.ndarray
    log_abs: np.ndarray
    args: np.ndarray
    increments: np.ndarray
    total_winding: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "f_re", "f_im", "log_abs_f", "arg_f"])
            mag = np.exp(np.minimum(self.log_abs, 700.0))
            for i in range(len(self.taus)):
                w.writerow([self.us[i], self.vs[i],
                            mag[i] * np.cos(self.args[i]), mag[i] * np.sin(self.args[i]),
                            self.log_abs[i], self.args[i]])


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    trace: BoundaryTrace
    zero_cells: tuple
    residual: float

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "residual": self.residual,
            "total_winding": self.trace.total_winding,
            "samples": len(self.trace.taus),
            "zero_cells": [{"rect": r.to_dict(), "local_degree": d}
                           for r, d in self.zero_cells],
        }


def _point(rect: Rectangle, tau: float) -> tuple[float, float]:
    """Counterclockwise boundary parametrization, tau in [0, 4]."""
    edge = min(int(tau), 3)
    frac = tau - edge
    if edge == 0:
        return rect.t_min + frac * rect.width, rect.s_min
    if edge == 1:
        return rect.t_max, rect.s_min + frac * rect.height
    if edge == 2:
        return rect.t_max - frac * rect.width, rect.s_max
    return rect.t_min, rect.s_max - frac * rect.height


def _wrap(dphi: float) -> float:
    return (dphi + np.pi) % (2.0 * np.pi) - np.pi


def _normalize(value) -> tuple[float, float]:
    """(log|f|, arg f) from a complex value or a DeterminantSample."""
    if isinstance(value, DeterminantSample):
        return value.log_abs_rho, value.arg_rho
    value = complex(value)
    if value == 0:
        return -np.inf, 0.0
    return float(np.log(abs(value))), float(np.angle(value))


def winding(f, rect: Rectangle, *, samples_per_edge: int = SAMPLES_PER_EDGE,
            max_depth: int = MAX_BISECTION_DEPTH,
            zero_rel_tol: float = ZERO_REL_TOL) -> DegreeResult:
    """Winding number of f restricted to the rectangle boundary.

    f is called as f(u, v) and may return a complex number or a
    DeterminantSample.  Raises BoundaryZeroError when |f| falls below the
    admissibility tolerance and NonConvergenceError when refinement or the
    residual budget is exhausted.
    """

    def evaluate(tau: float) -> _Sample:
        u, v = _point(rect, tau)
        log_abs, arg = _normalize(f(u, v))
        return _Sample(tau, u, v, log_abs, arg)

    taus0 = np.arange(4 * samples_per_edge + 1) / samples_per_edge
    samples = [evaluate(t) for t in taus0]

    log_rel = np.log(zero_rel_tol)

    def check_zero(s: _Sample, ref_log: float) -> None:
        if s.log_abs <= max(LOG_ABS_FLOOR, ref_log + log_rel):
            raise BoundaryZeroError(
                f"|f| <= zero tolerance at (u, v) = ({s.u:.6g}, {s.v:.6g})")

    # the trace is a closed contour: neighbors wrap around
    logs0 = np.array([s.log_abs for s in samples[:-1]])
    neighbor_max = np.maximum(np.roll(logs0, 1), np.roll(logs0, -1))
    for s, ref in zip(samples[:-1], neighbor_max):
        check_zero(s, float(ref))

    def refine(s1: _Sample, s2: _Sample, depth: int, ref_log: float) -> list[_Sample]:
        # the phase test alone can alias a full turn near a zero close to the
        # contour; there the modulus necessarily dips, so also require the
        # modulus to be continuous (within a factor e) between samples
        if (abs(_wrap(s2.arg - s1.arg)) < 0.5 * np.pi
                and abs(s2.log_abs - s1.log_abs) < 1.0):
            return []
        if depth == 0:
            # a zero on (or hugging) the contour shows up as a deep modulus
            # dip that bisection keeps chasing without the phase settling
            if min(s1.log_abs, s2.log_abs) <= ref_log - 10.0:
                raise BoundaryZeroError(
                    f"refinement exhausted in a modulus dip near (u, v) = "
                    f"({s1.u:.6g}, {s1.v:.6g}); 0 on or next to the contour")
            raise NonConvergenceError(
                f"argument increment did not settle near (u, v) = ({s1.u:.6g}, {s1.v:.6g})")
        sm = evaluate(0.5 * (s1.tau + s2.tau))
        check_zero(sm, max(s1.log_abs, s2.log_abs))
        return (refine(s1, sm, depth - 1, ref_log) + [sm]
                + refine(sm, s2, depth - 1, ref_log))

    refined: list[_Sample] = [samples[0]]
    for s1, s2 in zip(samples[:-1], samples[1:]):
        refined.extend(refine(s1, s2, max_depth, max(s1.log_abs, s2.log_abs)))
        refined.append(s2)

    args = np.array([s.arg for s in refined])
    increments = np.array([_wrap(d) for d in np.diff(args)])
    total = float(np.sum(increments))
    degree = int(np.rint(total / (2.0 * np.pi)))
    residual = abs(total / (2.0 * np.pi) - degree)
    if residual >= RESIDUAL_TOL:
        raise NonConvergenceError(f"winding residual {residual:.3g} >= {RESIDUAL_TOL}")
    trace = BoundaryTrace(
        taus=np.array([s.tau for s in refined]),
        us=np.array([s.u for s in refined]),
        vs=np.array([s.v for s in refined]),
        log_abs=np.array([s.log_abs for s in refined]),
        args=args,
        increments=increments,
        total_winding=total,
    )
    return DegreeResult(degree, trace, (), residual)


def winding_of_complex_map(f, rect: Rectangle, **kw) -> DegreeResult:
    """Winding of z |-> f(z) with z = u + i v over the rectangle boundary."""
    return winding(lambda u, v: f(u + 1j * v), rect, **kw)


def localize_zeros(f, rect: Rectangle, depth: int = 4, **kw) -> tuple:
    """Recursive quadrisection into zero-free-boundary cells with local degrees.

    Returns ((sub-rectangle, local degree), ...); the local degrees sum to the
    degree over the full rectangle by construction.
    """
    return tuple(_localize(f, rect, depth, None, kw))


def _localize(f, rect, depth, deg, kw):
    if deg is None:
        deg = winding(f, rect, **kw).degree
    if deg == 0:
        return []
    if depth == 0:
        return [(rect, deg)]
    for ft, fs in _SPLIT_FRACTIONS:
        quads = rect.split4(ft, fs)
        try:
            sub = [winding(f, q, **kw).degree for q in quads]
        except BoundaryZeroError:
            continue  # split line runs through a zero; jitter and retry
        if sum(sub) != deg:
            continue
        cells = []
        for q, dq in zip(quads, sub):
            cells.extend(_localize(f, q, depth - 1, dq, kw))
        return cells
    return [(rect, deg)]


def degree_index(spec: ProblemSpec, omega: Rectangle | None = None, *,
                 localize: bool = False, localize_depth: int = 4,
                 steps: int | None = None, **kw) -> DegreeResult:
    """deg(rho, Omega, 0) for the determinant map of the boundary matrix."""
    if omega is None:
        omega = default_rectangle(spec)

    def f(t, s):
        return rho(spec, t + 1j * s, steps=steps)

    result = winding(f, omega, **kw)
    if localize:
        cells = tuple(_localize(f, omega, localize_depth, result.degree, kw))
        result = DegreeResult(result.degree, result.trace, cells, result.residual)
    return result
