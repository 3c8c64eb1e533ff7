import numpy as np
import pytest

from degindex import (EndpointDegenerateError, NotAConjugatePointError,
                      ValidationError, choose_delta, constant_spec,
                      local_degree_at, morse_index, morse_via_degree,
                      scan_conjugate_points)
from degindex.morse import strip_winding


def scalar(c, length=np.pi):
    return constant_spec([[1.0]], [[-c]], length)


class TestScan:
    def test_scalar_conjugate_points(self):
        # det G_0(x) = sin(sqrt(12) x)/sqrt(12): zeros at k pi / sqrt(12)
        points = scan_conjugate_points(scalar(12.0))
        xs = [p.x for p in points]
        expected = [k * np.pi / np.sqrt(12.0) for k in (1, 2, 3)]
        np.testing.assert_allclose(xs, expected, atol=1e-8)
        assert all(p.multiplicity == 1 for p in points)

    def test_no_points_for_positive_operator(self):
        assert scan_conjugate_points(scalar(0.5)) == ()

    def test_even_order_zero_detected(self):
        # two branches vanish together at pi: no sign change of det G_0 there
        spec = constant_spec(np.eye(2), [[-4.0, -1.0], [0.0, -9.0]], 4.0)
        points = scan_conjugate_points(spec)
        xs = [p.x for p in points]
        np.testing.assert_allclose(
            xs, [np.pi / 3, np.pi / 2, 2 * np.pi / 3, np.pi], atol=1e-8)
        assert [p.multiplicity for p in points] == [1, 1, 1, 2]

    def test_requires_positive_p(self):
        with pytest.raises(ValidationError):
            scan_conjugate_points(constant_spec([[-1.0]], [[0.0]], 1.0))

    def test_requires_dirichlet(self):
        with pytest.raises(EndpointDegenerateError):
            scan_conjugate_points(
                constant_spec([[1.0]], [[-12.0]], np.pi, boundary="neumann"))


class TestChooseDelta:
    def test_precedes_first_point(self):
        spec = scalar(12.0)
        delta = choose_delta(spec)
        first = scan_conjugate_points(spec)[0].x
        assert 0 < delta < first

    def test_capped_for_point_free_problems(self):
        spec = scalar(0.5)
        assert choose_delta(spec) == pytest.approx(0.1 * np.pi)


class TestMorseViaDegree:
    def test_scalar_index(self):
        rep = morse_via_degree(scalar(12.0))
        assert rep.total_degree == 3
        assert [p.local_degree for p in rep.points] == [1, 1, 1]
        assert rep.total_degree == morse_index(scalar(12.0), m=300)

    def test_zero_index(self):
        assert morse_via_degree(scalar(0.5)).total_degree == 0

    def test_double_point_carries_degree_two(self):
        spec = constant_spec(np.eye(2), [[-4.0, -1.0], [0.0, -9.0]], 4.0)
        rep = morse_via_degree(spec)
        assert rep.total_degree == 5
        by_x = {round(p.x, 6): p.local_degree for p in rep.points}
        assert by_x[round(np.pi, 6)] == 2

    def test_mixed_signs_cancel(self):
        # one +1 point and one -1 point: index 0 despite two conjugate points
        spec = constant_spec(np.diag([1.0, 0.5]), [[1.8, -4.0], [1.05, -2.0]], 3.5)
        rep = morse_via_degree(spec)
        assert rep.total_degree == 0
        assert sorted(p.local_degree for p in rep.points) == [-1, 1]

    def test_degenerate_endpoint_rejected(self):
        # c = 4 on [0, pi]: x = pi is itself a conjugate point
        with pytest.raises(EndpointDegenerateError):
            morse_via_degree(scalar(4.0))

    def test_bad_delta_rejected(self):
        with pytest.raises(NotAConjugatePointError):
            morse_via_degree(scalar(12.0), delta=1.5)

    def test_dict_export(self):
        d = morse_via_degree(scalar(5.0)).to_dict()
        assert d["morse_index"] == 2
        assert len(d["conjugate_points"]) == 2


class TestLocalDegree:
    def test_window_around_single_point(self):
        spec = scalar(12.0)
        x0 = np.pi / np.sqrt(12.0)
        assert local_degree_at(spec, x0, half_width_x=0.3) == 1

    def test_empty_window(self):
        assert local_degree_at(scalar(12.0), 0.5, half_width_x=0.2) == 0


def test_strip_winding_matches_report():
    spec = scalar(12.0)
    rep = morse_via_degree(spec)
    raw = strip_winding(spec, rep.delta, rep.strip_height)
    assert raw.degree == rep.total_degree
    assert raw.residual < 1e-8
