"""Shape metrics: IMSPE, IUEA, Wasserstein-2, elastic registration, ESD."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvegp.curves import (Curve, arc_to_xy_param, generate_synthetic,
                            polygon_length, resample_equally_spaced)
from curvegp.errors import ValidationError
from curvegp.metrics import (elastic_register, esd, imspe, iuea, wasserstein2,
                             _dp_reparameterize, _warp, _energy)
from curvegp.model import PredictedCurve
from curvegp.preprocess import center, scale_to_unit_length, srvf


def make_pred(means, covs):
    m = len(means)
    return PredictedCurve(grid=np.arange(m) / m, means=np.asarray(means, float),
                          covariances=np.asarray(covs, float))


class TestImspe:
    def test_zero_for_truth(self):
        c = generate_synthetic("circle", 50)
        pts = np.array([arc_to_xy_param(c, i * polygon_length(c) / 40)
                        for i in range(40)])
        assert imspe(pts, c, 40) == pytest.approx(0.0, abs=1e-20)

    def test_constant_offset(self):
        c = generate_synthetic("circle", 50)
        pts = np.array([arc_to_xy_param(c, i * polygon_length(c) / 40)
                        for i in range(40)]) + 0.1
        assert imspe(pts, c, 40) == pytest.approx(0.02, abs=1e-12)

    def test_matches_direct_summation(self):
        c = generate_synthetic("circle", 200)
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(200, 2))
        length = polygon_length(c)
        oracle = sum(np.sum((pts[i] - arc_to_xy_param(c, i * length / 200)) ** 2)
                     for i in range(200)) / 200
        assert imspe(pts, c, 200) == pytest.approx(oracle, abs=1e-10)

    def test_size_mismatch_rejected(self):
        c = generate_synthetic("circle", 10)
        with pytest.raises(ValidationError):
            imspe(np.zeros((5, 2)), c, 7)


class TestIuea:
    def test_uniform_isotropic(self):
        covs = np.tile(np.diag([0.01, 0.01]), (20, 1, 1))
        pred = make_pred(np.zeros((20, 2)), covs)
        assert iuea(pred) == pytest.approx(np.pi * 0.01, abs=1e-12)

    def test_degenerate_zero(self):
        cov = np.array([[0.04, 0.04], [0.04, 0.04]])  # sd1^2 = sd2^2 = cross
        pred = make_pred(np.zeros((5, 2)), np.tile(cov, (5, 1, 1)))
        assert iuea(pred) == 0.0

    def test_independent_matches_summation(self):
        rng = np.random.default_rng(1)
        s1 = rng.uniform(0.01, 0.5, 30)
        s2 = rng.uniform(0.01, 0.5, 30)
        covs = np.zeros((30, 2, 2))
        covs[:, 0, 0] = s1 ** 2
        covs[:, 1, 1] = s2 ** 2
        pred = make_pred(np.zeros((30, 2)), covs)
        assert iuea(pred) == pytest.approx(np.pi * np.mean(s1 * s2), abs=1e-12)

    def test_scaling_property(self):
        rng = np.random.default_rng(2)
        covs = np.zeros((10, 2, 2))
        covs[:, 0, 0] = rng.uniform(0.01, 0.2, 10)
        covs[:, 1, 1] = rng.uniform(0.01, 0.2, 10)
        covs[:, 0, 1] = covs[:, 1, 0] = 0.2 * np.sqrt(covs[:, 0, 0] * covs[:, 1, 1])
        base = iuea(make_pred(np.zeros((10, 2)), covs))
        factor = 1.7
        inflated = covs * factor ** 2
        assert iuea(make_pred(np.zeros((10, 2)), inflated)) == pytest.approx(
            base * factor ** 2, rel=1e-10)


class TestWasserstein2:
    def test_identical_clouds(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(12, 2))
        assert wasserstein2(a, a) == pytest.approx(0.0, abs=1e-20)

    def test_single_points(self):
        assert wasserstein2([[0.0, 0.0]], [[1.0, 0.0]]) == pytest.approx(1.0)

    def test_two_point_example(self):
        assert wasserstein2([[0, 0], [1, 0]], [[0, 1], [1, 1]]) == pytest.approx(1.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = rng.integers(2, 8)
            a = rng.normal(size=(n, 2))
            b = rng.normal(size=(n, 2))
            brute = min(np.mean([np.sum((a[i] - b[p[i]]) ** 2) for i in range(n)])
                        for p in itertools.permutations(range(n)))
            assert wasserstein2(a, b) == pytest.approx(brute, abs=1e-12)

    def test_metric_properties(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = rng.integers(2, 7)
            a, b, c = (rng.normal(size=(n, 2)) for _ in range(3))
            dab, dba = wasserstein2(a, b), wasserstein2(b, a)
            assert dab == pytest.approx(dba, abs=1e-12)
            # triangle inequality holds for the square roots (W2 is a metric)
            assert np.sqrt(wasserstein2(a, c)) <= (np.sqrt(dab)
                                                   + np.sqrt(wasserstein2(b, c)) + 1e-10)

    def test_unequal_sizes_rejected(self):
        with pytest.raises(ValidationError):
            wasserstein2(np.zeros((3, 2)), np.zeros((4, 2)))

    def test_oversized_rejected(self):
        with pytest.raises(ValidationError):
            wasserstein2(np.zeros((600, 2)), np.zeros((600, 2)))


class TestElasticRegister:
    def test_self_registration(self):
        c = generate_synthetic("star", 60, amplitude=0.2, petals=5)
        reg = elastic_register(c, c, grid_size=60)
        assert reg.energy < 1e-10
        assert np.allclose(reg.rotation, np.eye(2), atol=1e-8)
        assert np.max(np.abs(reg.gamma - np.linspace(0, 1, 61))) < 1.0 / 60

    def test_rigid_transform_low_energy(self):
        c = generate_synthetic("star", 80, amplitude=0.25, petals=4)
        theta = 0.9
        R = np.array([[np.cos(theta), -np.sin(theta)],
                      [np.sin(theta), np.cos(theta)]])
        moved = Curve(np.roll(c.points, -11, axis=0) @ R.T * 2.3 + [1.0, -0.5])
        reg = elastic_register(moved, c, grid_size=80)
        assert reg.energy < 1e-3

    def test_energy_non_increasing(self):
        circle = generate_synthetic("circle", 100)
        ellipse = generate_synthetic("ellipse", 100, axes=(1.0, 0.5))
        reg = elastic_register(ellipse, circle)
        diffs = np.diff(reg.energies)
        assert np.all(diffs <= 1e-12)
        assert reg.energy <= reg.energies[0]

    def test_gamma_monotone_with_endpoints(self):
        circle = generate_synthetic("circle", 50)
        star = generate_synthetic("star", 50, amplitude=0.3)
        reg = elastic_register(star, circle, grid_size=50)
        assert reg.gamma[0] == 0.0
        assert reg.gamma[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(reg.gamma) > 0)

    def test_dp_matches_exhaustive_paths_on_tiny_grid(self):
        # enumerate every monotone path with the same step set on an 8-node
        # grid and verify the DP finds the minimum energy
        from curvegp.metrics import DP_STEPS
        rng = np.random.default_rng(7)
        n = 8
        ang1 = rng.uniform(0, 2 * np.pi, n)
        ang2 = rng.uniform(0, 2 * np.pi, n)
        q1 = np.column_stack([np.cos(ang1), np.sin(ang1)])
        q2 = np.column_stack([np.cos(ang2), np.sin(ang2)])

        def path_energy(path):
            gamma = np.interp(np.arange(n + 1), [p[0] for p in path],
                              [p[1] for p in path])
            return _energy(q1, _warp(q2, gamma))

        best = [np.inf]

        def explore(path):
            i, j = path[-1]
            if (i, j) == (n, n):
                best[0] = min(best[0], path_energy(path))
                return
            for di, dj in DP_STEPS:
                if i + di <= n and j + dj <= n:
                    explore(path + [(i + di, j + dj)])

        explore([(0, 0)])
        gamma_dp = _dp_reparameterize(q1, q2)
        assert _energy(q1, _warp(q2, gamma_dp)) == pytest.approx(best[0], abs=1e-10)


class TestEsd:
    def test_same_curve(self):
        c = generate_synthetic("star", 100, amplitude=0.2)
        assert esd(c, c) < 1e-3

    def test_rigid_invariance(self):
        c = generate_synthetic("star", 100, amplitude=0.2, petals=5)
        theta = 0.7
        R = np.array([[np.cos(theta), -np.sin(theta)],
                      [np.sin(theta), np.cos(theta)]])
        moved = Curve(np.roll(c.points, -17, axis=0) @ R.T * 1.9 + [0.3, -2.0])
        assert esd(c, moved) < 1e-2

    def test_circle_vs_ellipse_positive_and_stable(self):
        circle = generate_synthetic("circle", 100)
        ellipse = generate_synthetic("ellipse", 100, axes=(1.0, 0.5))
        d100 = esd(circle, ellipse, grid_size=100)
        circle2 = generate_synthetic("circle", 200)
        ellipse2 = generate_synthetic("ellipse", 200, axes=(1.0, 0.5))
        d200 = esd(circle2, ellipse2, grid_size=100)
        assert d100 > 0.1
        assert abs(d100 - d200) / d100 < 0.05

    def test_range(self):
        a = generate_synthetic("circle", 60)
        b = generate_synthetic("star", 60, amplitude=0.4, petals=8)
        val = esd(a, b, grid_size=60)
        assert 0.0 <= val <= np.pi
