"""Plane detection by one-point RANSAC over sparsely sampled oriented points.

A single point with a normal already determines a plane, so one oriented
sample per hypothesis is enough; the inlier ratio then drives an adaptive
iteration budget. Multi-plane extraction is greedy: detect, claim inliers,
repeat on what is left. Detection can optionally run per orientation group
(horizontal / vertical / other) over a shared claimed-points mask.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DegenerateInput,
    Orientation,
    PlaneModel,
    as_unit_vector,
    classify_orientation,
    fit_plane,
    plane_distances,
)
from .kdtree import KdTree
from .normals import SampleSet, build_sample_set

__all__ = [
    "NoPlaneFound",
    "OpsParams",
    "RansacResult",
    "adaptive_iterations",
    "detect_all_planes",
    "detect_grouped",
    "extract_full_inliers",
    "one_point_ransac",
]

GROUP_ORDER = (Orientation.HORIZONTAL, Orientation.VERTICAL, Orientation.OTHER)


class NoPlaneFound(RuntimeError):
    """No hypothesis reached the inlier threshold within the budget."""


@dataclass
class OpsParams:
    """Tuning knobs for the oriented-point detector.

    Defaults follow the sweet spot of the sweep in the README (3% sampling,
    30 neighbors); the distance threshold and minimum plane size match the
    evaluation constants used throughout the package.
    """

    sampling_rate: float = 0.03
    k: int = 30
    probability: float = 0.99
    dist_threshold: float = 0.05
    min_inliers: int = 20
    orientation_tol_degrees: float = 7.0
    up: tuple = (0.0, 0.0, 1.0)
    grouping: str = "group_first"  # or "detect_first"
    seed: int = 0
    sigma: float | None = None
    outlier_denominator: str = "samples"  # or "cloud"
    iteration_cap_factor: int = 10

    def __post_init__(self):
        if not 0.0 < self.sampling_rate <= 1.0:
            raise ValueError("sampling_rate must be in (0, 1]")
        if not 0.0 < self.probability < 1.0:
            raise ValueError("probability must be in (0, 1)")
        if self.dist_threshold <= 0.0:
            raise ValueError("dist_threshold must be positive")
        if self.min_inliers < 3:
            raise ValueError("min_inliers must be >= 3")
        if self.grouping not in ("group_first", "detect_first"):
            raise ValueError(f"unknown grouping {self.grouping!r}")
        if self.outlier_denominator not in ("samples", "cloud"):
            raise ValueError(f"unknown outlier_denominator {self.outlier_denominator!r}")
        as_unit_vector(self.up)


@dataclass
class RansacResult:
    """Winning hypothesis of one RANSAC run.

    ``sample_inliers`` are positions into the SampleSet arrays, not cloud
    indices; ``model.inliers`` holds the corresponding cloud indices.
    """

    model: PlaneModel
    sample_inliers: np.ndarray
    iterations: int


def adaptive_iterations(p: float, e: float, cap: int | None = None) -> int:
    """RANSAC iteration budget for a one-point minimal sample.

    ceil(log(1-p) / log(e)) where p is the required success probability and e
    the outlier fraction; with a single-point sample the probability of a good
    draw is exactly 1-e. Clamped to [1, cap].
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if not 0.0 <= e < 1.0:
        raise ValueError(f"e must be in [0, 1), got {e}")
    if e == 0.0:
        n = 1
    else:
        n = max(1, math.ceil(math.log(1.0 - p) / math.log(e)))
    if cap is not None:
        n = min(n, max(1, cap))
    return n


def one_point_ransac(
    samples: SampleSet,
    params: OpsParams,
    rng: np.random.Generator,
    alive: np.ndarray | None = None,
) -> RansacResult:
    """Find the sample-supported plane with the most inliers.

    Each iteration promotes one oriented sample to a plane hypothesis and
    counts samples within ``dist_threshold`` of it. The budget starts at the
    cloud size (capped at ``iteration_cap_factor`` times the pool size) and
    shrinks as better hypotheses tighten the outlier-ratio estimate. The
    winner is refit by least squares on its sample inliers.

    Args:
        alive: optional boolean mask restricting the working pool; retired
            samples are neither drawn nor counted.

    Raises:
        NoPlaneFound: no hypothesis collected more than ``min_inliers``
            samples within the budget.
    """
    if alive is None:
        pool = np.arange(len(samples), dtype=np.int64)
    else:
        pool = np.flatnonzero(alive)
    m = pool.size
    if m <= params.min_inliers:
        raise NoPlaneFound(f"{m} live samples cannot exceed min_inliers={params.min_inliers}")
    positions = samples.positions[pool]
    normals = samples.normals[pool]
    cap = params.iteration_cap_factor * m
    budget = min(samples.cloud_size, cap)
    denom = m if params.outlier_denominator == "samples" else samples.cloud_size

    best_count = 0
    best_mask = None
    it = 0
    while it < budget:
        pick = int(rng.integers(0, m))
        dists = np.abs((positions - positions[pick]) @ normals[pick])
        mask = dists < params.dist_threshold
        count = int(mask.sum())
        if count > params.min_inliers and count > best_count:
            best_count = count
            best_mask = mask
            e = 1.0 - count / denom
            budget = adaptive_iterations(params.probability, max(e, 0.0), cap=cap)
        it += 1

    if best_mask is None:
        raise NoPlaneFound(f"no hypothesis exceeded {params.min_inliers} inliers in {it} iterations")
    winners = pool[best_mask]
    try:
        model = fit_plane(samples.positions[winners], inliers=samples.indices[winners])
    except DegenerateInput as exc:
        raise NoPlaneFound(f"winning inlier set is degenerate: {exc}") from exc
    return RansacResult(model=model, sample_inliers=winners, iterations=it)


def extract_full_inliers(
    points: np.ndarray,
    model: PlaneModel,
    dist_threshold: float,
    active_mask: np.ndarray | None = None,
) -> PlaneModel:
    """Verify a sample-born hypothesis against the whole cloud.

    Claims every active point within ``dist_threshold`` of the plane and
    refits on them. With fewer than three claimed points the hypothesis
    geometry is kept and only the inlier list changes.
    """
    dists = plane_distances(points, model.centroid, model.normal)
    mask = dists < dist_threshold
    if active_mask is not None:
        mask &= active_mask
    idx = np.flatnonzero(mask).astype(np.int64)
    if idx.size >= 3:
        try:
            return fit_plane(points[idx], inliers=idx)
        except DegenerateInput:
            pass
    return PlaneModel(centroid=model.centroid, normal=model.normal, inliers=idx)


def _greedy_planes(
    points: np.ndarray,
    samples: SampleSet,
    alive: np.ndarray,
    member: np.ndarray,
    active_mask: np.ndarray,
    params: OpsParams,
    rng: np.random.Generator,
) -> list[PlaneModel]:
    """Detect planes from the live samples in ``member`` until exhausted.

    Mutates ``alive`` (sample pool, shared across groups) and ``active_mask``
    (cloud-level claimed points).
    """
    planes = []
    while int((alive & member).sum()) > params.min_inliers:
        try:
            result = one_point_ransac(samples, params, rng, alive=alive & member)
        except NoPlaneFound:
            break
        full = extract_full_inliers(points, result.model, params.dist_threshold, active_mask)
        # Retire spent samples from the shared pool: the winning sample set,
        # plus any sample (in any group) sitting on the claimed plane.
        alive[result.sample_inliers] = False
        near = plane_distances(samples.positions, full.centroid, full.normal) < params.dist_threshold
        alive &= ~near
        if full.inlier_count >= params.min_inliers:
            active_mask[full.inliers] = False
            planes.append(full)
    return planes


def _prepare(points: np.ndarray, params: OpsParams, rng: np.random.Generator | None):
    if rng is None:
        rng = np.random.default_rng(params.seed)
    kd = KdTree(points)
    samples = build_sample_set(points, kd, params.sampling_rate, params.k, rng, params.sigma)
    return samples, rng


def detect_all_planes(
    points: np.ndarray,
    params: OpsParams,
    rng: np.random.Generator | None = None,
    samples: SampleSet | None = None,
) -> list[PlaneModel]:
    """Extract every plane in the cloud, largest first, orientation-blind.

    Runs one-point RANSAC repeatedly, claiming each detected plane's full
    inlier set, until the remaining pool cannot hold another plane. Planes
    come back in detection order with pairwise-disjoint inlier sets of at
    least ``min_inliers`` points each.
    """
    if samples is None:
        samples, rng = _prepare(points, params, rng)
    elif rng is None:
        rng = np.random.default_rng(params.seed)
    alive = np.ones(len(samples), dtype=bool)
    member = np.ones(len(samples), dtype=bool)
    active_mask = np.ones(points.shape[0], dtype=bool)
    return _greedy_planes(points, samples, alive, member, active_mask, params, rng)


def sample_orientations(samples: SampleSet, params: OpsParams) -> np.ndarray:
    """Orientation code of each sample's estimated normal."""
    up = as_unit_vector(params.up)
    angles = np.degrees(np.arccos(np.clip(np.abs(samples.normals @ up), 0.0, 1.0)))
    codes = np.full(len(samples), int(Orientation.OTHER), dtype=np.int8)
    codes[angles <= params.orientation_tol_degrees] = int(Orientation.HORIZONTAL)
    codes[90.0 - angles <= params.orientation_tol_degrees] = int(Orientation.VERTICAL)
    return codes


def detect_grouped(
    points: np.ndarray,
    params: OpsParams,
    rng: np.random.Generator | None = None,
    samples: SampleSet | None = None,
) -> list[tuple[PlaneModel, Orientation]]:
    """Detect planes with orientation labels.

    With ``grouping="group_first"`` the oriented samples are partitioned into
    horizontal / vertical / other by their estimated normals and detection
    runs per group (in that fixed order) over one shared claimed-points mask;
    each plane carries its group's label. With ``grouping="detect_first"``
    detection runs on all samples and each plane is labeled by its refit
    normal afterwards.
    """
    if samples is None:
        samples, rng = _prepare(points, params, rng)
    elif rng is None:
        rng = np.random.default_rng(params.seed)

    if params.grouping == "detect_first":
        planes = detect_all_planes(points, params, rng=rng, samples=samples)
        up = as_unit_vector(params.up)
        return [
            (p, classify_orientation(p.normal, up, params.orientation_tol_degrees))
            for p in planes
        ]

    codes = sample_orientations(samples, params)
    alive = np.ones(len(samples), dtype=bool)
    active_mask = np.ones(points.shape[0], dtype=bool)
    labeled = []
    for orient in GROUP_ORDER:
        member = codes == int(orient)
        for plane in _greedy_planes(points, samples, alive, member, active_mask, params, rng):
            labeled.append((plane, orient))
    return labeled
