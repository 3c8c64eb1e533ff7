"""Closed forms for planar (2x2) constant-coefficient problems.

The operator is A u = -P u'' - V u on (0, a) with P = diag(1, d), d > 0, and a
constant real 2x2 matrix V, under Dirichlet conditions.  The shifted family
uses the zero-order term -V + i s Id, and det G_{is}(x) factors through the
two eigenvalue branches of P^{-1}(-V + i s Id):

    lambda_pm(s) = [-M + (d+1) i s +- sqrt(D1 - (d-1)^2 s^2 + D2 i s)] / (2 d)

with M = v22 + d v11, D1 = M^2 - 4 d det V, D2 = 4 d tr V - 2 (d+1) M.  Then

    det G_{is}(x) = phi(lambda_+(s), x) * phi(lambda_-(s), x) / d

for the entire function phi(lam, x) = sinh(sqrt(lam) x)/sqrt(lam).  Near s = 0
each branch linearizes as lambda(s) ~ a + i b s, and the local degree of
(s, x) |-> phi(lambda(s), x) at a zero is -sign(a b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLinearizationError, ValidationError
from .fundamental import phi_entire
from .problem import ProblemSpec, constant_spec


@dataclass(frozen=True)
class PlanarConstantProblem:
    d: float
    v: np.ndarray  # 2x2 real
    a: float       # interval length

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if v.shape != (2, 2) or not np.all(np.isfinite(v)):
            raise ValidationError("V must be a finite 2x2 real matrix")
        object.__setattr__(self, "v", v)
        if not (self.d > 0 and np.isfinite(self.d)):
            raise ValidationError("d must be positive and finite")
        if not (self.a > 0 and np.isfinite(self.a)):
            raise ValidationError("interval length must be positive")

    @property
    def tr_v(self) -> float:
        return float(self.v[0, 0] + self.v[1, 1])

    @property
    def det_v(self) -> float:
        return float(np.linalg.det(self.v))

    @property
    def m_weight(self) -> float:
        """M = v22 + d v11, the d-weighted trace."""
        return float(self.v[1, 1] + self.d * self.v[0, 0])

    @property
    def disc1(self) -> float:
        """D1 = M^2 - 4 d det V, discriminant of the s = 0 branch split."""
        return self.m_weight ** 2 - 4.0 * self.d * self.det_v

    @property
    def disc2(self) -> float:
        """D2 = 4 d tr V - 2 (d+1) M, the linear-in-s discriminant term."""
        return 4.0 * self.d * self.tr_v - 2.0 * (self.d + 1.0) * self.m_weight

    def to_problem_spec(self, shift: float = 0.0) -> ProblemSpec:
        p = np.diag([1.0, self.d])
        return constant_spec(p, -self.v, self.a, boundary="dirichlet", shift=shift)


def lambda_pm(prob: PlanarConstantProblem, s: float) -> tuple[complex, complex]:
    """(lambda_+, lambda_-) of P^{-1}(-V + i s Id); + carries the principal root."""
    root = np.sqrt(complex(prob.disc1 - (prob.d - 1.0) ** 2 * s * s
                           + 1j * prob.disc2 * s))
    base = -prob.m_weight + (prob.d + 1.0) * 1j * s
    return (complex((base + root) / (2.0 * prob.d)),
            complex((base - root) / (2.0 * prob.d)))


def char_residual(prob: PlanarConstantProblem, s: float, lam: complex) -> complex:
    """d lam^2 + (M - (d+1) i s) lam + (i s)^2 - tr V i s + det V; zero on branches."""
    z = 1j * s
    return (prob.d * lam * lam + (prob.m_weight - (prob.d + 1.0) * z) * lam
            + z * z - prob.tr_v * z + prob.det_v)


def lambda_pm_linearization(prob: PlanarConstantProblem):
    """First-order expansions lambda_pm(s) ~ a_pm + i b_pm s around s = 0.

    a_pm = (-M +- sqrt(D1)) / (2 d),
    b_pm = (2 (d+1) sqrt(D1) +- D2) / (4 d sqrt(D1)).
    Requires D1 > 0 (distinct real branches at s = 0).
    """
    if prob.disc1 <= 0:
        raise DegenerateLinearizationError(
            "branch discriminant D1 must be positive for a real linearization")
    r = np.sqrt(prob.disc1)
    a_p = (-prob.m_weight + r) / (2.0 * prob.d)
    a_m = (-prob.m_weight - r) / (2.0 * prob.d)
    b_p = (2.0 * (prob.d + 1.0) * r + prob.disc2) / (4.0 * prob.d * r)
    b_m = (2.0 * (prob.d + 1.0) * r - prob.disc2) / (4.0 * prob.d * r)
    return (float(a_p), float(b_p)), (float(a_m), float(b_m))


def det_g_analytic(prob: PlanarConstantProblem, s: float, x: float) -> complex:
    """det G_{is}(x) in closed form: phi(lambda_+) phi(lambda_-) / d."""
    lp, lm = lambda_pm(prob, s)
    return phi_entire(lp, x) * phi_entire(lm, x) / prob.d


def local_degree_sign(a: float, b: float) -> int:
    """Local degree of (s, x) |-> phi(a + i b s, x) at a simple interior zero.

    The branch crosses a conjugate point transversally iff a < 0 and b != 0;
    the degree there is -sign(a b).
    """
    if a == 0.0 or b == 0.0:
        raise DegenerateLinearizationError(
            "branch linearization is degenerate (a = 0 or b = 0)")
    return -int(np.sign(a * b))


def nilpotent_invariance_check(lam: float, nilpotent: np.ndarray, length: float,
                               m: int | None = None) -> int:
    """The Morse index is unchanged by a nilpotent zero-order perturbation.

    Compares -u'' + (lam Id) u against -u'' + (lam Id + N) u for nilpotent N:
    the finite-difference count and the strip winding must agree across both.
    Returns the common index; raises CrossCheckError on any mismatch.
    """
    from .errors import CrossCheckError
    from .morse import morse_via_degree
    from .oracle import morse_index

    n_mat = np.atleast_2d(np.asarray(nilpotent, dtype=float))
    n = n_mat.shape[0]
    if not np.allclose(np.linalg.matrix_power(n_mat, n), 0.0, atol=1e-12):
        raise ValidationError("perturbation matrix is not nilpotent")
    eye = np.eye(n)
    base = constant_spec(eye, lam * eye, length)
    pert = constant_spec(eye, lam * eye + n_mat, length)
    results = {
        "oracle_base": morse_index(base, m=m),
        "oracle_perturbed": morse_index(pert, m=m),
        "winding_base": morse_via_degree(base).total_degree,
        "winding_perturbed": morse_via_degree(pert).total_degree,
    }
    if len(set(results.values())) != 1:
        raise CrossCheckError("Morse index not invariant under the nilpotent "
                              "perturbation", **results)
    return results["oracle_base"]
