"""Counting results for planar constant problems in the Turing regime.

A kinetics matrix V with tr V < 0 and det V > 0 is linearly stable without
diffusion; diffusion-driven instability on (0, a) with P = diag(1, d) sets in
when the d-weighted trace M = v22 + d v11 exceeds 2 sqrt(d det V).  In that
regime the operator A = -P u'' - V u has exactly one negative eigenvalue per
Fourier mode k with

    (M - sqrt(D1)) a^2 / (2 d) < k^2 pi^2 < (M + sqrt(D1)) a^2 / (2 d),

and the count equals the Morse index, the conjugate-point balance
|C1| - |C2|, and the homotopy degree of the shifted family.  C1 and C2 are the
conjugate points contributed by the lambda_- and lambda_+ branches
(x = k pi / sqrt(-lambda)), with local degrees +1 and -1 respectively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import PlanarConstantProblem, lambda_pm_linearization
from .degree import degree_index
from .errors import (CrossCheckError, DegenerateThresholdError,
                     NotAConjugatePointError, TuringConditionError)
from .morse import local_degree_at, morse_via_degree
from .oracle import morse_index

THRESHOLD_REL_TOL = 1e-9
COINCIDENCE_REL_TOL = 1e-12
ROSTER_RESIDUAL_TOL = 1e-10
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class TuringReport:
    tr_negative: bool
    det_positive: bool
    weight_exceeds_threshold: bool  # M > 2 sqrt(d det V)
    disc1_positive: bool            # equivalent pair given det V > 0:
    weight_positive: bool           # D1 > 0 and M > 0

    @property
    def ok(self) -> bool:
        return (self.tr_negative and self.det_positive
                and self.weight_exceeds_threshold)


def turing_report(prob: PlanarConstantProblem) -> TuringReport:
    det_pos = prob.det_v > 0
    exceeds = det_pos and prob.m_weight > 2.0 * np.sqrt(prob.d * prob.det_v)
    return TuringReport(
        tr_negative=prob.tr_v < 0,
        det_positive=det_pos,
        weight_exceeds_threshold=exceeds,
        disc1_positive=prob.disc1 > 0,
        weight_positive=prob.m_weight > 0,
    )


def require_turing(prob: PlanarConstantProblem) -> TuringReport:
    rep = turing_report(prob)
    if not rep.ok:
        raise TuringConditionError(
            f"not in the instability regime: tr V = {prob.tr_v:.6g}, "
            f"det V = {prob.det_v:.6g}, M = {prob.m_weight:.6g}")
    return rep


def _mode_band(prob: PlanarConstantProblem) -> tuple[float, float]:
    """(lo, hi) bounds on k^2 pi^2 for unstable modes."""
    r = np.sqrt(prob.disc1)
    fac = prob.a ** 2 / (2.0 * prob.d)
    return (prob.m_weight - r) * fac, (prob.m_weight + r) * fac


@dataclass(frozen=True)
class ModeEigenvalue:
    k: int
    lam: float       # the negative eigenvalue of the mode
    lam_other: float
    residual: float


def count_negative_eigenvalues(prob: PlanarConstantProblem):
    """(count, roster) of negative eigenvalues of A = -P u'' - V u, Dirichlet.

    Mode k contributes the eigenvalue pair solving
    lam^2 + ((d+1) mu + tr V) lam + d mu^2 + M mu + det V = 0, mu = -k^2 pi^2 / a^2;
    exactly one root is negative when k^2 pi^2 lies in the unstable band.
    """
    require_turing(prob)
    lo, hi = _mode_band(prob)
    k_max = int(np.floor(np.sqrt(hi) / np.pi)) + 1
    roster = []
    for k in range(1, k_max + 1):
        kpi2 = (k * np.pi) ** 2
        gap = min(abs(kpi2 - lo), abs(kpi2 - hi))
        if gap < THRESHOLD_REL_TOL * max(abs(lo), abs(hi)):
            raise DegenerateThresholdError(
                f"mode k = {k} sits on the instability threshold")
        if not lo < kpi2 < hi:
            continue
        mu = -kpi2 / prob.a ** 2
        b = (prob.d + 1.0) * mu + prob.tr_v
        c = prob.d * mu * mu + prob.m_weight * mu + prob.det_v
        # c < 0 inside the band, so the roots are real with opposite signs;
        # compute the larger root first and recover the other from the product
        lam_big = 0.5 * (-b + np.sqrt(b * b - 4.0 * c))
        lam_neg = c / lam_big
        res = max(abs(lam_neg * lam_neg + b * lam_neg + c),
                  abs(lam_big * lam_big + b * lam_big + c))
        res /= max(1.0, c * c)
        if res > ROSTER_RESIDUAL_TOL:
            raise CrossCheckError("eigenvalue roster residual too large",
                                  k=k, residual=res)
        roster.append(ModeEigenvalue(k, float(lam_neg), float(lam_big), float(res)))
    return len(roster), tuple(roster)


@dataclass(frozen=True)
class ConjugateSets:
    c1: tuple  # from the lambda_- branch, local degree +1 each
    c2: tuple  # from the lambda_+ branch, local degree -1 each
    c3: tuple  # coincidences (x, k1, k2); degenerate configurations

    @property
    def balance(self) -> int:
        return len(self.c1) - len(self.c2)


def conjugate_sets(prob: PlanarConstantProblem) -> ConjugateSets:
    """Interior conjugate points of the two branches, plus exact coincidences.

    A coincidence requires (M + sqrt(D1)) / (M - sqrt(D1)) = k1^2 / k2^2
    exactly (to 1e-12 relative), which forces the ratio to be rational.
    Only requires distinct real branches (D1 > 0), not the full instability
    regime.
    """
    (a_p, _), (a_m, _) = lambda_pm_linearization(prob)

    def branch_points(a_branch: float) -> list[float]:
        if a_branch >= 0:
            return []
        step = np.pi / np.sqrt(-a_branch)
        return [k * step for k in range(1, int(prob.a / step) + 2)
                if k * step < prob.a * (1.0 - 1e-12)]

    c1 = branch_points(a_m)
    c2 = branch_points(a_p)
    c3 = []
    if a_p < 0 and a_m < 0:
        ratio = a_m / a_p  # = (M + sqrt(D1)) / (M - sqrt(D1)) > 1
        for k2 in range(1, len(c2) + 1):
            k1_sq = ratio * k2 * k2
            k1 = int(np.rint(np.sqrt(k1_sq)))
            if k1 >= 1 and abs(k1 * k1 / (k2 * k2) - ratio) < COINCIDENCE_REL_TOL * ratio:
                x = k2 * np.pi / np.sqrt(-a_p)
                if x < prob.a:
                    c3.append((float(x), k1, k2))
    return ConjugateSets(tuple(c1), tuple(c2), tuple(c3))


def local_degree_table(prob: PlanarConstantProblem, x0: float, *,
                       verify: bool = True) -> int:
    """Local degree at a conjugate point x0: +1 on C1, -1 on C2, 0 on both.

    Membership is decided by how close sqrt(-lambda(0)) x0 / pi is to an
    integer (tolerance 1e-9).  With verify=True the value is cross-checked
    against the numerical winding around (s, x) = (0, x0).
    """
    (a_p, _), (a_m, _) = lambda_pm_linearization(prob)

    def member(a_branch: float) -> bool:
        if a_branch >= 0:
            return False
        k = np.sqrt(-a_branch) * x0 / np.pi
        return abs(k - np.rint(k)) < MEMBERSHIP_TOL and np.rint(k) >= 1

    in_c1, in_c2 = member(a_m), member(a_p)
    if not (in_c1 or in_c2):
        raise NotAConjugatePointError(f"x0 = {x0:.6g} is not a conjugate point")
    value = int(in_c1) - int(in_c2)
    if verify:
        sets = conjugate_sets(prob)
        others = [x for x in sets.c1 + sets.c2 if abs(x - x0) > 1e-8]
        hw = 0.4 * min([abs(x - x0) for x in others] + [x0, prob.a - x0])
        numeric = local_degree_at(prob.to_problem_spec(), x0, half_width_x=hw)
        if numeric != value:
            raise CrossCheckError("analytic local degree disagrees with winding",
                                  analytic=value, numeric=numeric)
    return value


@dataclass(frozen=True)
class IndexAgreementReport:
    negative_count: int
    conjugate_balance: int
    strip_winding: int
    fd_count: int
    homotopy_degree: int | None

    @property
    def all_agree(self) -> bool:
        vals = {self.negative_count, self.conjugate_balance,
                self.strip_winding, self.fd_count}
        if self.homotopy_degree is not None:
            vals.add(self.homotopy_degree)
        return len(vals) == 1

    def to_dict(self) -> dict:
        return {
            "negative_count": self.negative_count,
            "conjugate_balance": self.conjugate_balance,
            "strip_winding": self.strip_winding,
            "fd_count": self.fd_count,
            "homotopy_degree": self.homotopy_degree,
            "all_agree": self.all_agree,
        }


def degree_equals_negative_count(prob: PlanarConstantProblem, *,
                                 shift: float | None = None,
                                 m: int | None = None) -> IndexAgreementReport:
    """Cross-check all index computations on one problem.

    Compares: the closed-form negative-eigenvalue count, the conjugate-point
    balance |C1| - |C2|, the strip winding, the finite-difference count, and
    (when a shift is given) the homotopy degree of the shifted family.
    Raises CrossCheckError on any disagreement.
    """
    count, _ = count_negative_eigenvalues(prob)
    sets = conjugate_sets(prob)
    if sets.c3:
        raise DegenerateThresholdError(
            f"coincident conjugate points {sets.c3}; the balance is ill-defined")
    spec0 = prob.to_problem_spec()
    report = IndexAgreementReport(
        negative_count=count,
        conjugate_balance=sets.balance,
        strip_winding=morse_via_degree(spec0).total_degree,
        fd_count=morse_index(spec0, m=m),
        homotopy_degree=(degree_index(prob.to_problem_spec(shift)).degree
                         if shift is not None else None),
    )
    if not report.all_agree:
        raise CrossCheckError("index computations disagree", **report.to_dict())
    return report


def sample_turing_problem(rng: np.random.Generator) -> PlanarConstantProblem:
    """Draw a random problem satisfying the instability conditions.

    d in (1.5, 4), v11 in (0.3, 2), v22 in (-d v11, -v11) (so tr V < 0 < M),
    det V = frac * M^2 / (4 d) with frac in (0.1, 0.9), v21 solved from the
    determinant; a in (1, 6).  Draws are rejected while any mode sits within
    1e-6 (relative) of an instability threshold or a conjugate point falls
    within 1e-3 of the endpoint.
    """
    while True:
        d = rng.uniform(1.5, 4.0)
        v11 = rng.uniform(0.3, 2.0)
        v22 = rng.uniform(-d * v11, -v11)
        m_weight = v22 + d * v11
        det_v = rng.uniform(0.1, 0.9) * m_weight ** 2 / (4.0 * d)
        v12 = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        v21 = (v11 * v22 - det_v) / v12
        a = rng.uniform(1.0, 6.0)
        prob = PlanarConstantProblem(d, np.array([[v11, v12], [v21, v22]]), a)
        if not turing_report(prob).ok:
            continue
        lo, hi = _mode_band(prob)
        ks = np.arange(1, int(np.sqrt(hi) / np.pi) + 2)
        kpi2 = (ks * np.pi) ** 2
        if np.min(np.abs(np.concatenate([kpi2 - lo, kpi2 - hi]))) < 1e-6 * hi:
            continue
        sets = conjugate_sets(prob)
        pts = np.array(sets.c1 + sets.c2, dtype=float)
        if pts.size and np.min(np.abs(pts - prob.a)) < 1e-3:
            continue
        if sets.c3:
            continue
        return prob
