"""Morse index via the winding of det G_{is}(x) over a strip boundary.

For the Dirichlet problem with positive-definite P, the Morse index (number of
negative eigenvalues) equals the winding number of f(s, x) = det G_{is}(x)
around the boundary of V = [-M, M] x [delta, length], traversed
counterclockwise with s horizontal and x vertical.  Here G_{is}(x) is the
lower-left block of the fundamental solution at z = i s, the strip height M
dominates the zero-order sup norm, and delta excludes the order-N zero of
det G at x = 0.

Zeros of f inside V sit at (0, x0) with x0 a conjugate point: an interior
point where the Dirichlet problem on [0, x0] has a zero eigenvalue.  Each
carries a positive local degree equal to the eigenvalue multiplicity, and the
local degrees sum to the index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .boundary import logdet_sample
from .degree import DegreeResult, winding
from .errors import CrossCheckError, EndpointDegenerateError, NotAConjugatePointError
from .fundamental import default_steps, fundamental_at, propagate
from .problem import ProblemSpec, Rectangle, default_strip_height, require_valid

SCAN_SAMPLES_PER_UNIT = 256
ROOT_XTOL = 1e-10
DIP_DETECT_REL = 1e-4
ZERO_ACCEPT_REL = 1e-10
MULTIPLICITY_SV_REL = 1e-7
ENDPOINT_REL_TOL = 1e-8


def _require_dirichlet(spec: ProblemSpec) -> None:
    require_valid(spec, require_positive=True)
    if spec.boundary.preset != "dirichlet":
        raise EndpointDegenerateError(
            "conjugate-point analysis requires the Dirichlet boundary preset")


class _DetG:
    """det G_0(x) evaluator reusing a dense forward propagation at z = 0."""

    def __init__(self, spec: ProblemSpec, x_max: float, samples: int):
        self.spec = spec
        steps = max(samples, default_steps(x_max))
        self.sol = propagate(spec, 0.0, x_max, steps=steps)
        self.xs = self.sol.xs
        n = spec.n
        gs = self.sol.psis[:, n:, :n]
        self.dets = np.array([np.linalg.det(g).real for g in gs])
        # reference magnitude for rank decisions at (near-)zero matrices
        self.g_scale = float(np.max(np.linalg.norm(gs, axis=(1, 2))))

    def psi_at(self, x: float) -> np.ndarray:
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        i = max(0, min(i, len(self.xs) - 1))
        if x <= self.xs[i] + 1e-15:
            return self.sol.psis[i]
        return propagate(self.spec, 0.0, x, steps=16,
                         x_start=float(self.xs[i]), psi0=self.sol.psis[i]).psi_end

    def g_at(self, x: float) -> np.ndarray:
        n = self.spec.n
        return self.psi_at(x)[n:, :n]

    def __call__(self, x: float) -> float:
        return float(np.linalg.det(self.g_at(x)).real)


@dataclass(frozen=True)
class ConjugatePoint:
    x: float
    multiplicity: int
    local_degree: int | None = None


@dataclass(frozen=True)
class ConjugateReport:
    points: tuple
    delta: float
    strip_height: float
    total_degree: int

    def to_dict(self) -> dict:
        return {
            "morse_index": self.total_degree,
            "delta": self.delta,
            "strip_height": self.strip_height,
            "conjugate_points": [{"x": p.x, "multiplicity": p.multiplicity,
                                  "local_degree": p.local_degree}
                                 for p in self.points],
        }


def _multiplicity(g: np.ndarray, scale: float) -> int:
    sv = np.linalg.svd(g, compute_uv=False)
    return int(np.sum(sv < MULTIPLICITY_SV_REL * max(scale, 1e-30)))


def scan_conjugate_points(spec: ProblemSpec, x_max: float | None = None,
                          samples: int | None = None) -> tuple:
    """Zeros of det G_0 in (0, x_max], with multiplicities from the rank drop.

    Sign changes are bracketed and bisected; even-order zeros (no sign change)
    are detected as deep local minima of |det G_0| and refined as simple zeros
    of its centered-difference derivative.
    """
    _require_dirichlet(spec)
    if x_max is None:
        x_max = spec.length
    if samples is None:
        samples = max(256, int(SCAN_SAMPLES_PER_UNIT * x_max))
    det = _DetG(spec, x_max, samples)
    d, xs = det.dets, det.xs
    scale = float(np.max(np.abs(d)))
    # skip the structural zero at x = 0 (order N)
    start = int(np.searchsorted(xs, 1e-3 * x_max))
    roots: list[float] = []
    for i in range(max(start, 1), len(xs) - 1):
        if d[i] == 0.0:
            roots.append(float(xs[i]))
        elif d[i] * d[i + 1] < 0:
            roots.append(float(brentq(det, xs[i], xs[i + 1], xtol=ROOT_XTOL)))
        elif (abs(d[i]) < DIP_DETECT_REL * scale
              and abs(d[i]) <= abs(d[i - 1]) and abs(d[i]) < abs(d[i + 1])):
            # candidate even-order zero: refine on the derivative of det G_0
            eps = 1e-6 * max(1.0, x_max)

            def ddet(x):
                return (det(x + eps) - det(x - eps)) / (2.0 * eps)

            lo, hi = float(xs[i - 1]), float(xs[i + 1])
            if ddet(lo) * ddet(hi) < 0:
                x0 = float(brentq(ddet, lo, hi, xtol=ROOT_XTOL))
                if abs(det(x0)) < ZERO_ACCEPT_REL * scale:
                    roots.append(x0)
    # merge near-duplicates from adjacent brackets
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > 1e-8 * max(1.0, x_max):
            merged.append(r)
    return tuple(ConjugatePoint(r, _multiplicity(det.g_at(r), det.g_scale))
                 for r in merged)


def choose_delta(spec: ProblemSpec, points: tuple | None = None) -> float:
    """Left strip edge: clears x = 0 while keeping every conjugate point inside."""
    if points is None:
        points = scan_conjugate_points(spec)
    first = points[0].x if points else spec.length
    return min(0.5 * first, 0.1 * spec.length)


def _strip_map(spec: ProblemSpec, steps: int | None):
    def f(s: float, x: float):
        psi = fundamental_at(spec, 1j * s, x, steps=steps)
        return logdet_sample(s + 1j * x, psi[spec.n:, :spec.n])
    return f


def local_degree_at(spec: ProblemSpec, x0: float, *, half_width_x: float,
                    half_width_s: float = 1.0, steps: int | None = None,
                    samples_per_edge: int = 24) -> int:
    """Winding of det G_{is}(x) around a window centered at (s, x) = (0, x0)."""
    rect = Rectangle(-half_width_s, half_width_s, x0 - half_width_x, x0 + half_width_x)
    return winding(_strip_map(spec, steps), rect,
                   samples_per_edge=samples_per_edge).degree


def morse_via_degree(spec: ProblemSpec, delta: float | None = None,
                     strip_height: float | None = None, *,
                     steps: int | None = None,
                     samples_per_edge: int = 64) -> ConjugateReport:
    """Morse index as the winding of det G_{is}(x) over the strip boundary.

    Also localizes: each conjugate point gets a local degree from a small
    window, and the local degrees must sum to the total.
    """
    _require_dirichlet(spec)
    points = scan_conjugate_points(spec)

    # the endpoint must be nondegenerate, otherwise the index is ill-defined
    det = _DetG(spec, spec.length, 256)
    scale = float(np.max(np.abs(det.dets)))
    if abs(det.dets[-1]) < ENDPOINT_REL_TOL * scale:
        raise EndpointDegenerateError(
            "det G_0(length) is numerically zero; perturb the length or add a "
            "positive zero-order shift")

    if delta is None:
        delta = choose_delta(spec, points)
    if points and points[0].x <= delta:
        raise NotAConjugatePointError(
            f"delta = {delta:.6g} does not precede the first conjugate point "
            f"{points[0].x:.6g}")
    if strip_height is None:
        strip_height = default_strip_height(spec)

    f = _strip_map(spec, steps)
    rect = Rectangle(-strip_height, strip_height, delta, spec.length)
    total = winding(f, rect, samples_per_edge=samples_per_edge).degree

    interior = [p for p in points if delta < p.x < spec.length]
    located = []
    if interior:
        edges = [delta] + [p.x for p in interior] + [spec.length]
        for k, p in enumerate(interior):
            hw = 0.45 * min(edges[k + 1] - edges[k], edges[k + 2] - edges[k + 1])
            deg = local_degree_at(spec, p.x, half_width_x=hw,
                                  half_width_s=min(1.0, strip_height),
                                  steps=steps)
            located.append(ConjugatePoint(p.x, p.multiplicity, deg))
    if sum(p.local_degree for p in located) != total:
        raise CrossCheckError("local degrees do not sum to the strip winding",
                              total=total,
                              local_sum=sum(p.local_degree for p in located))
    return ConjugateReport(tuple(located), float(delta), float(strip_height), total)


def strip_winding(spec: ProblemSpec, delta: float, strip_height: float,
                  *, steps: int | None = None,
                  samples_per_edge: int = 64) -> DegreeResult:
    """Raw winding result over [-M, M] x [delta, length] without localization."""
    _require_dirichlet(spec)
    rect = Rectangle(-strip_height, strip_height, delta, spec.length)
    return winding(_strip_map(spec, steps), rect, samples_per_edge=samples_per_edge)
