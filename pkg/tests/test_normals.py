"""Normal estimation tests: analytic planes, spheres, weighting behavior."""

import numpy as np
import pytest

from planeops import (
    AllDegenerate,
    DegenerateNeighborhood,
    KdTree,
    build_sample_set,
    estimate_normal,
    estimate_normals,
    sample_indices,
)


def _angle_to(n, reference):
    reference = np.asarray(reference, dtype=float)
    reference = reference / np.linalg.norm(reference)
    return np.arccos(np.clip(np.abs(n @ reference), 0.0, 1.0))


def _plane_cloud(rng, n, a=0.3, b=-0.2):
    xy = rng.uniform(-1, 1, size=(n, 2))
    return np.column_stack([xy, a * xy[:, 0] + b * xy[:, 1]])


class TestEstimateNormal:
    def test_cross_neighborhood(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float)
        normal = estimate_normal(pts, 0, KdTree(pts), k=4)
        np.testing.assert_allclose(normal, [0, 0, 1], atol=1e-12)

    def test_analytic_plane(self, rng):
        pts = _plane_cloud(rng, 2000)
        kd = KdTree(pts)
        normals, _, valid = estimate_normals(pts, kd, np.arange(200), k=10)
        assert valid.all()
        truth = np.array([0.3, -0.2, -1.0])
        angles = np.array([_angle_to(n, truth) for n in normals])
        assert angles.max() < 1e-6

    def test_sphere_median_error(self, rng):
        v = rng.normal(size=(2000, 3))
        pts = v / np.linalg.norm(v, axis=1, keepdims=True)
        kd = KdTree(pts)
        normals, _, valid = estimate_normals(pts, kd, np.arange(2000), k=10)
        assert valid.all()
        angles = np.array([_angle_to(n, p) for n, p in zip(normals, pts)])
        assert np.degrees(np.median(angles)) < 5.0

    def test_collinear_neighborhood_degenerate(self):
        pts = np.array([[float(i), 0, 0] for i in range(6)])
        with pytest.raises(DegenerateNeighborhood):
            estimate_normal(pts, 0, KdTree(pts), k=4)

    def test_duplicate_reference_neighbor_skipped(self):
        pts = np.array([[0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float)
        normal = estimate_normal(pts, 0, KdTree(pts), k=5)
        np.testing.assert_allclose(normal, [0, 0, 1], atol=1e-12)

    def test_single_call_matches_batch(self, rng):
        pts = _plane_cloud(rng, 200) + rng.normal(scale=0.01, size=(200, 3))
        kd = KdTree(pts)
        batch, _, valid = estimate_normals(pts, kd, np.arange(20), k=8)
        assert valid.all()
        for i in range(20):
            np.testing.assert_array_equal(estimate_normal(pts, i, kd, k=8), batch[i])

    def test_coplanar_curvature_zero(self, rng):
        pts = _plane_cloud(rng, 500)
        kd = KdTree(pts)
        _, curvature, valid = estimate_normals(pts, kd, np.arange(50), k=10)
        assert valid.all()
        assert curvature.max() < 1e-9

    def test_near_outlier_tilts_more_than_far_outlier(self, rng):
        # Gaussian weighting: an off-plane point near the reference must
        # perturb the estimate more than the same point placed far away.
        disk = rng.uniform(-1, 1, size=(40, 2))
        base = np.column_stack([disk, np.zeros(40)])
        ref = np.zeros(3)

        def tilt(outlier):
            pts = np.vstack([ref, base, outlier])
            kd = KdTree(pts)
            n = estimate_normal(pts, 0, kd, k=41, sigma=0.5)
            return _angle_to(n, [0, 0, 1])

        near = tilt(np.array([[0.1, 0.0, 0.4]]))
        far = tilt(np.array([[0.9, 0.0, 0.4]]))
        assert near > far

    def test_scale_invariance_with_adaptive_sigma(self, rng):
        pts = _plane_cloud(rng, 300) + rng.normal(scale=0.005, size=(300, 3))
        scaled = pts * 37.0
        n1 = estimate_normal(pts, 5, KdTree(pts), k=10)
        n2 = estimate_normal(scaled, 5, KdTree(scaled), k=10)
        np.testing.assert_allclose(n1, n2, atol=1e-9)


class TestSampleIndices:
    def test_full_rate_returns_all(self, rng):
        idx = sample_indices(10, 1.0, rng)
        assert sorted(idx.tolist()) == list(range(10))

    def test_half_rate(self, rng):
        idx = sample_indices(10, 0.5, rng)
        assert len(idx) == 5
        assert len(set(idx.tolist())) == 5

    def test_rounds_up_to_one(self, rng):
        assert len(sample_indices(1000, 1e-6, rng)) == 1

    def test_deterministic_for_seed(self):
        a = sample_indices(100, 0.3, np.random.default_rng(7))
        b = sample_indices(100, 0.3, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_rate_validation(self, rng):
        with pytest.raises(ValueError):
            sample_indices(10, 0.0, rng)
        with pytest.raises(ValueError):
            sample_indices(10, 1.5, rng)


class TestBuildSampleSet:
    def test_planar_cloud_all_aligned(self, rng):
        pts = _plane_cloud(rng, 1000)
        kd = KdTree(pts)
        samples = build_sample_set(pts, kd, rate=0.1, k=10, rng=rng)
        assert len(samples) == 100
        truth = np.array([0.3, -0.2, -1.0])
        for n in samples.normals:
            assert _angle_to(n, truth) < 1e-6

    def test_single_sample(self, rng):
        pts = _plane_cloud(rng, 50)
        samples = build_sample_set(pts, KdTree(pts), rate=1e-9, k=5, rng=rng)
        assert len(samples) == 1

    def test_collinear_cloud_all_degenerate(self, rng):
        pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
        with pytest.raises(AllDegenerate):
            build_sample_set(pts, KdTree(pts), rate=1.0, k=3, rng=rng)

    def test_bookkeeping(self, rng):
        # a planar cloud with one far-duplicated spot: that sample drops
        pts = np.vstack([_plane_cloud(rng, 400), np.full((5, 3), 100.0)])
        kd = KdTree(pts)
        samples = build_sample_set(pts, kd, rate=1.0, k=4, rng=rng)
        assert len(samples) + samples.n_degenerate == 405
        assert samples.n_degenerate >= 5
