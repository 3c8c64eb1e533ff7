"""Problem data: coefficient fields, boundary conditions, parameter rectangles.

A problem instance is the second-order operator

    A_z u = -(P u' + Q u)' + Q^T u' + S u + C_z u,      C_z = C0 + t*K*Id + i*s*Id

on the interval [0, length] together with boundary matrices R0, R1.  The
symmetric part of the zeroth-order term lives in S, the non-symmetric remainder
in C0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ValidationError

SCHEMA_VERSION = 1
VALIDATION_GRID_POINTS = 129
SAFETY_FACTOR = 2.0
EPS_FLOOR = 1.0


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CoefficientField:
    """An x-dependent real N x N matrix: constant, polynomial or sampled grid."""

    kind: str  # "constant" | "polynomial" | "grid"
    values: np.ndarray  # constant: (N,N); polynomial: (deg+1,N,N); grid: (m,N,N)
    nodes: np.ndarray | None = None  # grid only, strictly increasing
    _spline: object = field(default=None, repr=False, compare=False)

    @staticmethod
    def constant(mat) -> "CoefficientField":
        mat = _readonly(np.atleast_2d(mat))
        return CoefficientField("constant", mat)

    @staticmethod
    def polynomial(coeffs) -> "CoefficientField":
        coeffs = _readonly(np.asarray(coeffs, dtype=float))
        if coeffs.ndim != 3:
            raise ValidationError("polynomial coefficients must have shape (deg+1, N, N)")
        return CoefficientField("polynomial", coeffs)

    @staticmethod
    def sampled(nodes, values) -> "CoefficientField":
        nodes = _readonly(np.asarray(nodes, dtype=float).ravel())
        values = _readonly(np.asarray(values, dtype=float))
        if nodes.size < 2:
            raise ValidationError("sampled grid needs at least 2 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValidationError("sampled grid nodes must be strictly increasing")
        if values.shape[0] != nodes.size or values.ndim != 3:
            raise ValidationError("sampled values must have shape (len(nodes), N, N)")
        spline = CubicSpline(nodes, values, axis=0)
        return CoefficientField("grid", values, nodes=nodes, _spline=spline)

    @property
    def dim(self) -> int:
        return self.values.shape[-1]

    def __call__(self, x: float) -> np.ndarray:
        return self.eval_many(np.asarray([x], dtype=float))[0]

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate at many x values; returns (len(xs), N, N)."""
        xs = np.asarray(xs, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(self.values, (xs.size,) + self.values.shape).copy()
        if self.kind == "polynomial":
            out = np.zeros((xs.size,) + self.values.shape[1:])
            xp = np.ones_like(xs)
            for coeff in self.values:
                out += xp[:, None, None] * coeff
                xp = xp * xs
            return out
        return np.asarray(self._spline(xs))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "values": self.values.tolist()}
        if self.nodes is not None:
            d["nodes"] = self.nodes.tolist()
        return d

    @staticmethod
    def from_dict(d: dict) -> "CoefficientField":
        kind = d["kind"]
        if kind == "constant":
            return CoefficientField.constant(d["values"])
        if kind == "polynomial":
            return CoefficientField.polynomial(d["values"])
        if kind == "grid":
            return CoefficientField.sampled(d["nodes"], d["values"])
        raise ValidationError(f"unknown coefficient kind {kind!r}")


def _block(n, a, b, c, d):
    z = np.zeros((n, n))
    eye = np.eye(n)
    parts = {"0": z, "I": eye}
    return np.block([[parts[a], parts[b]], [parts[c], parts[d]]])


@dataclass(frozen=True)
class BoundaryCondition:
    """R0 w(0) + R1 w(length) = 0 with w = (v, u)^T, v = P u' + Q u."""

    r0: np.ndarray
    r1: np.ndarray
    preset: str | None = None

    @staticmethod
    def dirichlet(n: int) -> "BoundaryCondition":
        return BoundaryCondition(_readonly(_block(n, "0", "I", "0", "0")),
                                 _readonly(_block(n, "0", "0", "0", "I")), "dirichlet")

    @staticmethod
    def neumann(n: int) -> "BoundaryCondition":
        return BoundaryCondition(_readonly(_block(n, "I", "0", "0", "0")),
                                 _readonly(_block(n, "0", "0", "I", "0")), "neumann")

    @staticmethod
    def periodic(n: int) -> "BoundaryCondition":
        eye = np.eye(2 * n)
        return BoundaryCondition(_readonly(eye), _readonly(-eye), "periodic")

    @staticmethod
    def custom(r0, r1) -> "BoundaryCondition":
        r0 = _readonly(np.atleast_2d(r0))
        r1 = _readonly(np.atleast_2d(r1))
        return BoundaryCondition(r0, r1, "custom")

    @property
    def dim(self) -> int:
        return self.r0.shape[0] // 2

    def classify(self) -> str:
        """Recognize the preset from the matrices (expansion is involutive)."""
        n = self.dim
        for name, maker in (("dirichlet", BoundaryCondition.dirichlet),
                            ("neumann", BoundaryCondition.neumann),
                            ("periodic", BoundaryCondition.periodic)):
            ref = maker(n)
            if np.array_equal(self.r0, ref.r0) and np.array_equal(self.r1, ref.r1):
                return name
        return "custom"

    def to_dict(self) -> dict:
        if self.preset in ("dirichlet", "neumann", "periodic"):
            return {"preset": self.preset}
        return {"R0": self.r0.tolist(), "R1": self.r1.tolist()}

    @staticmethod
    def from_dict(d: dict, n: int) -> "BoundaryCondition":
        if "preset" in d and d["preset"] != "custom":
            return {"dirichlet": BoundaryCondition.dirichlet,
                    "neumann": BoundaryCondition.neumann,
                    "periodic": BoundaryCondition.periodic}[d["preset"]](n)
        return BoundaryCondition.custom(d["R0"], d["R1"])


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned parameter rectangle [t_min,t_max] x [s_min,s_max]."""

    t_min: float
    t_max: float
    s_min: float
    s_max: float

    def __post_init__(self):
        if not (self.t_min < self.t_max and self.s_min < self.s_max):
            raise ValidationError("rectangle requires t_min < t_max and s_min < s_max")

    @property
    def width(self) -> float:
        return self.t_max - self.t_min

    @property
    def height(self) -> float:
        return self.s_max - self.s_min

    def split4(self, ft: float = 0.5, fs: float = 0.5):
        """Quadrisect at the given interior fractions."""
        tm = self.t_min + ft * self.width
        sm = self.s_min + fs * self.height
        return (Rectangle(self.t_min, tm, self.s_min, sm),
                Rectangle(tm, self.t_max, self.s_min, sm),
                Rectangle(self.t_min, tm, sm, self.s_max),
                Rectangle(tm, self.t_max, sm, self.s_max))

    def to_dict(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max,
                "s_min": self.s_min, "s_max": self.s_max}


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    length: float
    p: CoefficientField
    q: CoefficientField
    s: CoefficientField
    c0: CoefficientField
    boundary: BoundaryCondition
    perturbation_shift: float = 0.0  # K in C_z = C0 + t*K*Id + i*s*Id

    @property
    def is_constant(self) -> bool:
        return all(f.kind == "constant" for f in (self.p, self.q, self.s, self.c0))

    def zero_order(self, xs: np.ndarray, t: float, s: float) -> np.ndarray:
        """S(x) + C0(x) + t*K*Id + i*s*Id at the given nodes; complex iff s != 0."""
        xs = np.asarray(xs, dtype=float)
        out = self.s.eval_many(xs) + self.c0.eval_many(xs)
        shift = t * self.perturbation_shift
        if s != 0.0:
            out = out.astype(complex)
            shift = shift + 1j * s
        if shift != 0.0:
            out = out + shift * np.eye(self.n)
        return out

    def with_boundary(self, boundary: BoundaryCondition) -> "ProblemSpec":
        return replace(self, boundary=boundary)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    c_sup: float | None

    @property
    def ok(self) -> bool:
        return not self.violations


def _specnorm(mats: np.ndarray) -> np.ndarray:
    return np.linalg.norm(mats, ord=2, axis=(1, 2))


def validate(spec: ProblemSpec, require_positive: bool = False) -> ValidationReport:
    """Check structural invariants on a 129-point grid; compute the sup-norm bound.

    C_sup = sup_x ||S(x)|| + ||C0(x)|| + K is used to size the strip height.
    """
    v: list[str] = []
    if spec.n < 1:
        v.append("dimension must be >= 1")
    if not spec.length > 0:
        v.append("interval length must be positive")
    if spec.perturbation_shift < 0:
        v.append("perturbation shift K must be >= 0")
    for name, f in (("P", spec.p), ("Q", spec.q), ("S", spec.s), ("C0", spec.c0)):
        if f.dim != spec.n:
            v.append(f"{name} has dimension {f.dim}, expected {spec.n}")
        if f.kind == "grid":
            if f.nodes[0] > 0 or f.nodes[-1] < spec.length:
                v.append(f"{name} grid does not cover [0, length]")
    if spec.boundary.dim != spec.n:
        v.append("boundary matrices have wrong dimension")
    if v:
        return ValidationReport(tuple(v), None)

    xs = np.linspace(0.0, spec.length, VALIDATION_GRID_POINTS)
    ps = spec.p.eval_many(xs)
    ss = spec.s.eval_many(xs)
    c0s = spec.c0.eval_many(xs)
    for name, mats in (("P", ps), ("S", ss), ("C0", c0s), ("Q", spec.q.eval_many(xs))):
        if not np.all(np.isfinite(mats)):
            v.append(f"{name} evaluates to non-finite values")
    if not v:
        if np.max(np.abs(ps - np.swapaxes(ps, 1, 2))) > 1e-12 * (1 + np.max(np.abs(ps))):
            v.append("P not symmetric")
        if np.max(np.abs(ss - np.swapaxes(ss, 1, 2))) > 1e-12 * (1 + np.max(np.abs(ss))):
            v.append("S not symmetric")
        conds = np.linalg.cond(ps)
        if not np.all(np.isfinite(conds)) or np.max(conds) > 1e12:
            v.append("P not invertible")
        elif require_positive:
            mineig = np.min(np.linalg.eigvalsh(ps))
            if mineig <= 0:
                v.append("P not positive definite")
    c_sup = None
    if not v:
        c_sup = float(np.max(_specnorm(ss)) + np.max(_specnorm(c0s))
                      + spec.perturbation_shift)
    return ValidationReport(tuple(v), c_sup)


def require_valid(spec: ProblemSpec, require_positive: bool = False) -> ValidationReport:
    rep = validate(spec, require_positive=require_positive)
    if not rep.ok:
        raise ValidationError(rep.violations)
    return rep


def default_strip_height(spec: ProblemSpec) -> float:
    """M = safety_factor * max(C_sup, eps_floor); no spectrum meets s = +-M."""
    rep = require_valid(spec)
    return SAFETY_FACTOR * max(rep.c_sup, EPS_FLOOR)


def default_rectangle(spec: ProblemSpec) -> Rectangle:
    m = default_strip_height(spec)
    return Rectangle(0.0, 1.0, -m, m)


# ---------------------------------------------------------------------------
# Problem files (JSON, schema_version tagged)

def spec_to_dict(spec: ProblemSpec, name: str | None = None,
                 rectangle: Rectangle | None = None) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "n": spec.n,
        "length": spec.length,
        "coefficients": {
            "P": spec.p.to_dict(),
            "Q": spec.q.to_dict(),
            "S": spec.s.to_dict(),
            "C0": spec.c0.to_dict(),
        },
        "boundary": spec.boundary.to_dict(),
        "perturbation_shift": spec.perturbation_shift,
    }
    if name:
        d["name"] = name
    if rectangle is not None:
        d["rectangle"] = rectangle.to_dict()
    return d


def spec_from_dict(d: dict) -> tuple[ProblemSpec, dict]:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {d.get('schema_version')!r}")
    try:
        n = int(d["n"])
        co = d["coefficients"]
        spec = ProblemSpec(
            n=n,
            length=float(d["length"]),
            p=CoefficientField.from_dict(co["P"]),
            q=CoefficientField.from_dict(co["Q"]),
            s=CoefficientField.from_dict(co["S"]),
            c0=CoefficientField.from_dict(co["C0"]),
            boundary=BoundaryCondition.from_dict(d["boundary"], n),
            perturbation_shift=float(d.get("perturbation_shift", 0.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"problem file missing field {exc}") from exc
    extras = {"name": d.get("name")}
    if "rectangle" in d:
        r = d["rectangle"]
        extras["rectangle"] = Rectangle(r["t_min"], r["t_max"], r["s_min"], r["s_max"])
    return spec, extras


def load_problem(path) -> tuple[ProblemSpec, dict]:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def save_problem(spec: ProblemSpec, path, name=None, rectangle=None) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec, name, rectangle), indent=2))


def constant_spec(p, zero_order_matrix, length, boundary="dirichlet", q=None,
                  shift=0.0, n=None) -> ProblemSpec:
    """Convenience builder: constant coefficients with the symmetric/skew split.

    ``zero_order_matrix`` is S(x) + C0(x); its symmetric part goes to S and the
    skew part to C0.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    w = np.atleast_2d(np.asarray(zero_order_matrix, dtype=float))
    n = n or p.shape[0]
    q = np.zeros((n, n)) if q is None else np.atleast_2d(q)
    sym = 0.5 * (w + w.T)
    skew = 0.5 * (w - w.T)
    if isinstance(boundary, str):
        boundary = {"dirichlet": BoundaryCondition.dirichlet,
                    "neumann": BoundaryCondition.neumann,
                    "periodic": BoundaryCondition.periodic}[boundary](n)
    return ProblemSpec(n=n, length=float(length),
                       p=CoefficientField.constant(p),
                       q=CoefficientField.constant(q),
                       s=CoefficientField.constant(sym),
                       c0=CoefficientField.constant(skew),
                       boundary=boundary,
                       perturbation_shift=float(shift))
