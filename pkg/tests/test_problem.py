import json

import numpy as np
import pytest

from degindex import (BoundaryCondition, CoefficientField, ProblemSpec,
                      ValidationError, constant_spec, default_rectangle,
                      default_strip_height, load_problem, save_problem,
                      spec_from_dict, spec_to_dict, validate)
from degindex.problem import Rectangle


def scalar(c=12.0, length=np.pi, shift=15.0):
    return constant_spec([[1.0]], [[-c]], length, shift=shift)


class TestCoefficientField:
    def test_constant(self):
        f = CoefficientField.constant([[2.0, 1.0], [1.0, 3.0]])
        assert f.kind == "constant"
        np.testing.assert_allclose(f(1.7), [[2.0, 1.0], [1.0, 3.0]])
        assert f.eval_many(np.linspace(0, 1, 5)).shape == (5, 2, 2)

    def test_polynomial(self):
        # 1 + 2x + 3x^2, scalar
        f = CoefficientField.polynomial([[[1.0]], [[2.0]], [[3.0]]])
        xs = np.array([0.0, 0.5, 2.0])
        np.testing.assert_allclose(f.eval_many(xs)[:, 0, 0],
                                   1 + 2 * xs + 3 * xs ** 2)

    def test_grid_interpolates_samples(self):
        nodes = np.linspace(0.0, 2.0, 9)
        vals = np.cos(nodes)[:, None, None] * np.eye(1)
        f = CoefficientField.sampled(nodes, vals)
        np.testing.assert_allclose(f.eval_many(nodes)[:, 0, 0], np.cos(nodes),
                                   atol=1e-12)
        # cubic spline accuracy between nodes
        assert abs(f(1.1)[0, 0] - np.cos(1.1)) < 1e-3

    def test_grid_rejects_bad_nodes(self):
        with pytest.raises(ValidationError):
            CoefficientField.sampled([0.0, 0.0], np.zeros((2, 1, 1)))

    def test_roundtrip(self):
        for f in (CoefficientField.constant([[1.5]]),
                  CoefficientField.polynomial([[[1.0]], [[2.0]]]),
                  CoefficientField.sampled([0.0, 1.0, 2.0], np.ones((3, 1, 1)))):
            g = CoefficientField.from_dict(json.loads(json.dumps(f.to_dict())))
            np.testing.assert_allclose(g.eval_many(np.linspace(0, 1, 7)),
                                       f.eval_many(np.linspace(0, 1, 7)))


class TestBoundaryCondition:
    def test_dirichlet_shape(self):
        bc = BoundaryCondition.dirichlet(2)
        assert bc.preset == "dirichlet"
        # u(0) = 0 rows and u(length) = 0 rows
        np.testing.assert_allclose(bc.r0[:2, 2:], np.eye(2))
        np.testing.assert_allclose(bc.r1[2:, 2:], np.eye(2))

    def test_periodic(self):
        bc = BoundaryCondition.periodic(1)
        np.testing.assert_allclose(bc.r0 + bc.r1 @ np.eye(2), np.zeros((2, 2)))

    def test_classify_recognizes_presets(self):
        for name in ("dirichlet", "neumann", "periodic"):
            bc = getattr(BoundaryCondition, name)(2)
            custom = BoundaryCondition.custom(bc.r0, bc.r1)
            assert custom.classify() == name


class TestValidate:
    def test_valid_scalar(self):
        rep = validate(scalar())
        assert rep.ok
        assert rep.c_sup == pytest.approx(27.0)  # |S| + |C0| + shift

    def test_asymmetric_p_rejected(self):
        spec = ProblemSpec(
            n=2, length=1.0,
            p=CoefficientField.constant([[1.0, 0.5], [0.0, 1.0]]),
            q=CoefficientField.constant(np.zeros((2, 2))),
            s=CoefficientField.constant(np.zeros((2, 2))),
            c0=CoefficientField.constant(np.zeros((2, 2))),
            boundary=BoundaryCondition.dirichlet(2))
        assert any("symmetric" in v for v in validate(spec).violations)

    def test_singular_p_rejected(self):
        spec = constant_spec([[1.0, 1.0], [1.0, 1.0]], np.zeros((2, 2)), 1.0)
        assert any("invertible" in v for v in validate(spec).violations)

    def test_indefinite_p_flagged_when_positivity_required(self):
        spec = constant_spec([[-1.0]], [[0.0]], 1.0)
        assert validate(spec).ok
        assert not validate(spec, require_positive=True).ok

    def test_negative_shift_rejected(self):
        spec = constant_spec([[1.0]], [[0.0]], 1.0, shift=-1.0)
        assert not validate(spec).ok


class TestRectangle:
    def test_dimensions(self):
        r = Rectangle(0.0, 1.0, -2.0, 2.0)
        assert r.width == 1.0 and r.height == 4.0

    def test_split4_partitions(self):
        r = Rectangle(0.0, 1.0, -2.0, 2.0)
        quads = r.split4(0.3, 0.6)
        assert len(quads) == 4
        assert sum(q.width * q.height for q in quads) == pytest.approx(4.0)
        assert {q.t_min for q in quads} == {0.0, 0.3}

    def test_default_strip_height_dominates_zero_order(self):
        spec = scalar(c=12.0, shift=15.0)
        assert default_strip_height(spec) == pytest.approx(54.0)  # 2 * (12+15)
        rect = default_rectangle(spec)
        assert (rect.t_min, rect.t_max) == (0.0, 1.0)
        assert rect.s_max == -rect.s_min


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        spec = constant_spec(np.diag([1.0, 0.5]), [[1.8, -4.0], [1.05, -2.0]],
                             3.5, shift=2.0)
        path = tmp_path / "p.json"
        save_problem(spec, path, name="demo")
        loaded, extras = load_problem(path)
        assert extras["name"] == "demo"
        assert loaded.n == 2 and loaded.length == 3.5
        xs = np.linspace(0, 3.5, 11)
        np.testing.assert_allclose(loaded.zero_order(xs, 0.3, 0.7),
                                   spec.zero_order(xs, 0.3, 0.7))

    def test_unknown_schema_rejected(self):
        d = spec_to_dict(scalar())
        d["schema_version"] = 99
        with pytest.raises(ValidationError):
            spec_from_dict(d)

    def test_missing_field_rejected(self):
        d = spec_to_dict(scalar())
        del d["coefficients"]
        with pytest.raises(ValidationError):
            spec_from_dict(d)

    def test_zero_order_shift(self):
        spec = scalar(c=12.0, shift=15.0)
        xs = np.array([0.5])
        assert spec.zero_order(xs, 0.0, 0.0)[0, 0, 0] == pytest.approx(-12.0)
        assert spec.zero_order(xs, 1.0, 0.0)[0, 0, 0] == pytest.approx(3.0)
        z = spec.zero_order(xs, 0.0, 2.0)[0, 0, 0]
        assert z == pytest.approx(-12.0 + 2.0j)
