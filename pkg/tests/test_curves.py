"""Curve geometry: polygon length, arc-length parameterization, resampling,
and synthetic generation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvegp.curves import (Curve, arc_to_xy_param, generate_synthetic,
                            polygon_length, resample_equally_spaced,
                            xy_to_arc_param, _oversampled_polygon)
from curvegp.errors import CurveError, DegenerateCurveError

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def circle_polygon(n, radius=1.0):
    theta = 2 * np.pi * np.arange(n) / n
    return Curve(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


class TestCurveValidation:
    def test_requires_three_points(self):
        with pytest.raises(CurveError):
            Curve(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_requires_planar_points(self):
        with pytest.raises(CurveError):
            Curve(np.zeros((4, 3)))

    def test_closure_row_dropped(self):
        c = Curve(np.vstack([SQUARE, SQUARE[:1]]))
        assert c.n == 4

    def test_duplicate_points_merged_with_warning(self):
        pts = np.array([[0, 0], [1, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        with pytest.warns(UserWarning):
            c = Curve(pts)
        assert c.n == 4

    def test_points_immutable(self):
        c = Curve(SQUARE)
        with pytest.raises(ValueError):
            c.points[0, 0] = 5.0


class TestPolygonLength:
    def test_unit_square(self):
        assert polygon_length(Curve(SQUARE)) == pytest.approx(4.0, abs=1e-12)

    def test_inscribed_square(self):
        assert polygon_length(circle_polygon(4)) == pytest.approx(4 * np.sqrt(2), abs=1e-12)

    def test_circle_1000(self):
        value = polygon_length(circle_polygon(1000))
        assert value == pytest.approx(2000 * np.sin(np.pi / 1000), abs=1e-12)
        assert abs(2 * np.pi - value) < 1.1e-5

    def test_degenerate_merged_to_error(self):
        with pytest.raises(CurveError):
            with pytest.warns(UserWarning):
                Curve(np.zeros((5, 2)))


class TestXyToArc:
    def test_first_point_is_zero(self):
        assert xy_to_arc_param(Curve(SQUARE), (0.0, 0.0)) == 0.0

    def test_second_vertex(self):
        assert xy_to_arc_param(Curve(SQUARE), (1.0, 0.0)) == pytest.approx(1.0, abs=1e-12)

    def test_off_curve_projects(self):
        s = xy_to_arc_param(Curve(SQUARE), (0.5, -0.2))
        assert s == pytest.approx(0.5, abs=0.5 / 20 + 1e-12)

    def test_result_in_range(self):
        c = circle_polygon(17)
        length = polygon_length(c)
        for q in [(2.0, 2.0), (-1.0, 0.3), (0.0, 0.0)]:
            assert 0.0 <= xy_to_arc_param(c, q) < length

    def test_tie_breaks_to_smallest(self):
        # query at the centroid of the square is equidistant from all sides
        s = xy_to_arc_param(Curve(SQUARE), (0.5, 0.5))
        dense, arcs = _oversampled_polygon(Curve(SQUARE), 19)
        dist = np.linalg.norm(dense - np.array([0.5, 0.5]), axis=1)
        min_arcs = arcs[np.isclose(dist, dist.min())]
        assert s == min_arcs.min()


class TestArcToXy:
    def test_endpoints(self):
        c = Curve(SQUARE)
        assert np.allclose(arc_to_xy_param(c, 0.0), [0.0, 0.0])
        assert np.allclose(arc_to_xy_param(c, 4.0), [0.0, 0.0])

    def test_side_midpoint(self):
        assert np.allclose(arc_to_xy_param(Curve(SQUARE), 0.5), [0.5, 0.0])

    def test_wrapping(self):
        c = Curve(SQUARE)
        assert np.allclose(arc_to_xy_param(c, 4.5), arc_to_xy_param(c, 0.5))
        assert np.allclose(arc_to_xy_param(c, -0.5), arc_to_xy_param(c, 3.5))

    def test_output_on_polygon(self):
        c = circle_polygon(9)
        length = polygon_length(c)
        closed = c.closed_points()
        rng = np.random.default_rng(0)
        for s in rng.uniform(0, length, 50):
            p = arc_to_xy_param(c, s)
            dists = []
            for a, b in zip(closed[:-1], closed[1:]):
                ab = b - a
                t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0, 1)
                dists.append(np.linalg.norm(p - (a + t * ab)))
            assert min(dists) < 1e-12


class TestRoundTrip:
    def test_round_trip_bound(self):
        c = circle_polygon(23)
        length = polygon_length(c)
        seg = polygon_length(c) / 23  # equal segments for the regular polygon
        rng = np.random.default_rng(1)
        for s in rng.uniform(0, length, 200):
            back = xy_to_arc_param(c, arc_to_xy_param(c, s))
            err = min(abs(back - s), length - abs(back - s))
            assert err <= seg / 20 + 1e-12


class TestResample:
    def test_square_vertices(self):
        r = resample_equally_spaced(Curve(SQUARE), 4)
        assert np.allclose(r.points, SQUARE, atol=1e-12)

    def test_idempotent_on_equal_spacing(self):
        c = circle_polygon(16)
        r = resample_equally_spaced(c, 16)
        assert np.allclose(r.points, c.points, atol=1e-12)

    def test_circle_positions(self):
        c = circle_polygon(1000)
        r = resample_equally_spaced(c, 10)
        theta = 2 * np.pi * np.arange(10) / 10
        expected = np.column_stack([np.cos(theta), np.sin(theta)])
        assert np.max(np.abs(r.points - expected)) < 1e-3

    def test_rejects_small_m(self):
        with pytest.raises(CurveError):
            resample_equally_spaced(Curve(SQUARE), 2)


class TestPerimeterConsistency:
    def test_monotone_decreasing_error(self):
        errors = []
        for n in [8, 16, 32, 64, 128, 256, 512, 1024]:
            errors.append(abs(2 * np.pi - polygon_length(circle_polygon(n))))
        assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
        assert errors[-1] < 1e-4


class TestGenerateSynthetic:
    def test_circle_four_points(self):
        c = generate_synthetic("circle", 4)
        assert np.allclose(c.points, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-12)

    def test_noiseless_on_shape(self):
        c = generate_synthetic("star", 50, amplitude=0.2, petals=5)
        theta = np.arctan2(c.points[:, 1], c.points[:, 0])
        r = np.linalg.norm(c.points, axis=1)
        assert np.allclose(r, 1 + 0.2 * np.cos(5 * theta), atol=1e-10)

    def test_ellipse_perimeter(self):
        c = generate_synthetic("ellipse", 100, axes=(1.0, 0.5))
        # quadrature of the ellipse arc-length integral
        t = np.linspace(0, 2 * np.pi, 200001)
        speed = np.sqrt(np.sin(t) ** 2 + 0.25 * np.cos(t) ** 2)
        perimeter = np.trapezoid(speed, t)
        assert abs(polygon_length(c) - perimeter) / perimeter < 1e-3

    def test_deterministic(self):
        a = generate_synthetic("circle", 20, noise_sd=0.05, rng_seed=7)
        b = generate_synthetic("circle", 20, noise_sd=0.05, rng_seed=7)
        assert np.array_equal(a.points, b.points)

    def test_invalid_star_params(self):
        with pytest.raises(ValueError):
            generate_synthetic("star", 10, amplitude=1.5)
        with pytest.raises(ValueError):
            generate_synthetic("star", 10, petals=0)

    def test_clustered_scheme(self):
        c = generate_synthetic("circle", 30, scheme="clustered",
                               cluster_center=0.0, cluster_width=np.pi / 2,
                               cluster_frac=0.8)
        theta = np.arctan2(c.points[:, 1], c.points[:, 0])
        inside = np.sum(np.abs(((theta + np.pi) % (2 * np.pi)) - np.pi) <= np.pi / 4 + 1e-9)
        assert inside >= 0.7 * 30


@settings(max_examples=50, deadline=None)
@given(n=st.integers(min_value=3, max_value=40),
       seed=st.integers(min_value=0, max_value=10_000))
def test_resample_preserves_closure_property(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 2))
    try:
        c = Curve(pts)
    except CurveError:
        return
    r = resample_equally_spaced(c, 12)
    assert r.n == 12
    # resampled points all lie on the original polygon (within tolerance)
    for p in r.points:
        s = xy_to_arc_param(c, p)
        assert np.linalg.norm(arc_to_xy_param(c, s) - p) < polygon_length(c) / 12
