"""Pairwise coplanarity merging of detected planes.

Two planes merge when their normals agree within an angular threshold and
each centroid lies close to the other plane. Merging repeats greedily,
largest pair first, until no pair passes the test, so the output is a
fixpoint of the coplanarity relation.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateInput, PlaneModel, fit_plane, plane_distances, point_plane_distance

__all__ = ["MergeParams", "coplanar", "dedupe_inliers", "merge_all"]


@dataclass
class MergeParams:
    """Coplanarity thresholds; defaults reuse the detector constants."""

    angle_degrees: float = 7.0
    offset: float = 0.05

    def __post_init__(self):
        if self.angle_degrees <= 0.0 or self.offset <= 0.0:
            raise ValueError("merge thresholds must be positive")


def coplanar(a: PlaneModel, b: PlaneModel, params: MergeParams) -> bool:
    """Three-part test: normal angle plus both centroid-to-plane offsets."""
    cos_tol = np.cos(np.radians(params.angle_degrees))
    if abs(float(np.dot(a.normal, b.normal))) < cos_tol:
        return False
    return (
        point_plane_distance(b.centroid, a) <= params.offset
        and point_plane_distance(a.centroid, b) <= params.offset
    )


def dedupe_inliers(planes: list[PlaneModel], points: np.ndarray) -> list[PlaneModel]:
    """Give every multiply-claimed point to the plane it is nearest to.

    Detectors with local verification can claim the same point from several
    planes; metrics need one owner per point. Ties go to the earlier plane.
    Planes left without inliers are dropped; no point is lost.
    """
    if not planes:
        return []
    all_claims = np.concatenate([p.inliers for p in planes]) if planes else np.empty(0)
    if np.unique(all_claims).size == all_claims.size:
        return [p for p in planes if p.inlier_count > 0]
    claimed: dict[int, int] = {}
    best_dist: dict[int, float] = {}
    for pi, plane in enumerate(planes):
        if plane.inlier_count == 0:
            continue
        dists = plane_distances(points[plane.inliers], plane.centroid, plane.normal)
        for idx, d in zip(plane.inliers.tolist(), dists.tolist()):
            if idx not in claimed or d < best_dist[idx]:
                claimed[idx] = pi
                best_dist[idx] = d
    buckets: list[list[int]] = [[] for _ in planes]
    for idx, pi in claimed.items():
        buckets[pi].append(idx)
    out = []
    for plane, bucket in zip(planes, buckets):
        if not bucket:
            continue
        inliers = np.sort(np.asarray(bucket, dtype=np.int64))
        out.append(PlaneModel(centroid=plane.centroid, normal=plane.normal, inliers=inliers))
    return out


def _refit_union(points: np.ndarray, a: PlaneModel, b: PlaneModel) -> PlaneModel:
    union = np.union1d(a.inliers, b.inliers)
    if union.size >= 3:
        try:
            return fit_plane(points[union], inliers=union)
        except DegenerateInput:
            pass
    keep = a if a.inlier_count >= b.inlier_count else b
    return PlaneModel(centroid=keep.centroid, normal=keep.normal, inliers=union)


def merge_all(planes: list[PlaneModel], points: np.ndarray, params: MergeParams) -> list[PlaneModel]:
    """Merge coplanar planes to a fixpoint.

    Overlapping inlier sets are deduplicated first (nearest plane wins), then
    the coplanar pair with the largest combined size merges repeatedly: union
    the inliers, refit by least squares, rescan. The result has no coplanar
    pair left, preserves the total (deduplicated) inlier count, and is sorted
    by descending inlier count.
    """
    current = dedupe_inliers(planes, points)
    if len(current) <= 1:
        return current

    cos_tol = np.cos(np.radians(params.angle_degrees))
    while len(current) > 1:
        normals = np.array([p.normal for p in current])
        centroids = np.array([p.centroid for p in current])
        sizes = np.array([p.inlier_count for p in current])
        angle_ok = np.abs(normals @ normals.T) >= cos_tol
        sep = centroids[None, :, :] - centroids[:, None, :]
        dist_to = np.abs(np.einsum("abj,aj->ab", sep, normals))  # centroid b against plane a
        ok = angle_ok & (dist_to <= params.offset) & (dist_to.T <= params.offset)
        np.fill_diagonal(ok, False)
        if not ok.any():
            break
        combined = np.where(ok, sizes[:, None] + sizes[None, :], -1)
        a, b = np.unravel_index(int(np.argmax(combined)), combined.shape)
        a, b = (int(a), int(b)) if a < b else (int(b), int(a))
        merged = _refit_union(points, current[a], current[b])
        current = [p for i, p in enumerate(current) if i not in (a, b)]
        current.append(merged)

    order = sorted(range(len(current)), key=lambda i: -current[i].inlier_count)
    return [current[i] for i in order]
