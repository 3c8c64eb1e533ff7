import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degindex import (CrossCheckError, DegenerateLinearizationError,
                      PlanarConstantProblem, ValidationError, char_residual,
                      det_g_analytic, fundamental_at, lambda_pm,
                      lambda_pm_linearization, local_degree_sign,
                      nilpotent_invariance_check)

EXAMPLE = PlanarConstantProblem(0.5, np.array([[-1.8, 4.0], [-1.05, 2.0]]), 3.5)
LONG = PlanarConstantProblem(0.5, np.array([[-1.0, -2.0], [49 / 128, 0.75]]), 16.0)

finite = st.floats(-10.0, 10.0, allow_nan=False)


class TestScalars:
    def test_example_invariants(self):
        assert EXAMPLE.m_weight == pytest.approx(1.1)
        assert EXAMPLE.disc1 == pytest.approx(0.01)
        assert EXAMPLE.disc2 == pytest.approx(-2.9)
        assert EXAMPLE.det_v == pytest.approx(0.6)

    def test_validation(self):
        with pytest.raises(ValidationError):
            PlanarConstantProblem(-1.0, np.eye(2), 1.0)
        with pytest.raises(ValidationError):
            PlanarConstantProblem(1.0, np.eye(3), 1.0)

    def test_to_problem_spec_zero_order(self):
        spec = EXAMPLE.to_problem_spec()
        np.testing.assert_allclose(spec.zero_order(np.array([0.0]), 0.0, 0.0)[0],
                                   -EXAMPLE.v)
        np.testing.assert_allclose(spec.p(0.0), np.diag([1.0, 0.5]))


class TestBranches:
    def test_example_branch_values(self):
        lp, lm = lambda_pm(EXAMPLE, 0.0)
        assert lp == pytest.approx(-1.0, abs=1e-12)
        assert lm == pytest.approx(-1.2, abs=1e-12)

    def test_example_linearization(self):
        (a_p, b_p), (a_m, b_m) = lambda_pm_linearization(EXAMPLE)
        assert a_p == pytest.approx(-1.0, abs=1e-12)
        assert b_p == pytest.approx(-13.0, abs=1e-10)
        assert a_m == pytest.approx(-1.2, abs=1e-12)
        assert b_m == pytest.approx(16.0, abs=1e-10)

    def test_linearization_matches_finite_difference(self):
        eps = 1e-9
        for prob in (EXAMPLE, LONG):
            (a_p, b_p), (a_m, b_m) = lambda_pm_linearization(prob)
            lp, lm = lambda_pm(prob, eps)
            # the quadratic term in s is real, so the imaginary part isolates b
            assert ((lp - a_p) / eps).imag == pytest.approx(b_p, rel=1e-5)
            assert ((lm - a_m) / eps).imag == pytest.approx(b_m, rel=1e-5)

    def test_degenerate_discriminant_rejected(self):
        prob = PlanarConstantProblem(1.0, np.array([[1.0, 0.0], [0.0, 1.0]]), 1.0)
        assert prob.disc1 == 0.0
        with pytest.raises(DegenerateLinearizationError):
            lambda_pm_linearization(prob)

    @settings(max_examples=150, deadline=None)
    @given(d=st.floats(0.1, 10.0), v11=finite, v12=finite, v21=finite,
           v22=finite, s=st.floats(-20.0, 20.0))
    def test_branches_satisfy_characteristic_polynomial(self, d, v11, v12, v21,
                                                        v22, s):
        prob = PlanarConstantProblem(d, np.array([[v11, v12], [v21, v22]]), 1.0)
        scale = max(1.0, abs(prob.m_weight), abs(prob.det_v), s * s)
        for lam in lambda_pm(prob, s):
            assert abs(char_residual(prob, s, lam)) < 1e-10 * scale


class TestDetG:
    def test_matches_fundamental_solution(self):
        spec = LONG.to_problem_spec()
        for s in (-3.0, -0.4, 0.0, 0.7, 4.0):
            for x in (0.5, 2.0, 7.5):
                psi = fundamental_at(spec, 1j * s, x)
                num = np.linalg.det(psi[2:, :2])
                ana = det_g_analytic(LONG, s, x)
                assert num == pytest.approx(ana, rel=1e-9, abs=1e-12)

    def test_conjugate_symmetry(self):
        for s, x in ((0.8, 1.2), (2.5, 3.0)):
            assert det_g_analytic(EXAMPLE, -s, x) == pytest.approx(
                np.conj(det_g_analytic(EXAMPLE, s, x)), rel=1e-12)


class TestLocalDegreeSign:
    def test_signs(self):
        assert local_degree_sign(-1.0, 16.0) == 1
        assert local_degree_sign(-1.0, -13.0) == -1
        assert local_degree_sign(2.0, 3.0) == -1

    def test_degenerate(self):
        with pytest.raises(DegenerateLinearizationError):
            local_degree_sign(0.0, 1.0)
        with pytest.raises(DegenerateLinearizationError):
            local_degree_sign(1.0, 0.0)


class TestNilpotentInvariance:
    def test_index_preserved(self):
        n_mat = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert nilpotent_invariance_check(-12.0, n_mat, np.pi, m=400) == 6

    def test_scaled_nilpotent(self):
        n_mat = np.array([[0.0, 0.5], [0.0, 0.0]])
        assert nilpotent_invariance_check(-5.0, n_mat, np.pi, m=400) == 4

    def test_non_nilpotent_rejected(self):
        with pytest.raises(ValidationError):
            nilpotent_invariance_check(-5.0, np.eye(2), np.pi)
