"""Synthetic planar scenes with exact membership labels.

Scenes are described by a JSON-friendly dict: a list of rectangles (corner
plus two edge vectors, each with a point count) and an optional count of
uniform clutter points. The generator returns the cloud together with the
true labeling, which makes it the oracle for detector tests.
"""

import numpy as np

from .geometry import Orientation, as_points, canonical_sign, classify_orientation
from .truth import SegmentLabeling

__all__ = ["InvalidSpec", "box_room_scene", "gen_synthetic", "make_box_room", "random_scene"]


class InvalidSpec(ValueError):
    """Scene description is malformed."""


def _rect_arrays(rect: dict, index: int):
    try:
        corner = np.asarray(rect["corner"], dtype=np.float64).reshape(3)
        edge_u = np.asarray(rect["edge_u"], dtype=np.float64).reshape(3)
        edge_v = np.asarray(rect["edge_v"], dtype=np.float64).reshape(3)
        count = int(rect["count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"rect {index}: {exc}") from exc
    if count < 1:
        raise InvalidSpec(f"rect {index}: count must be >= 1, got {count}")
    normal = np.cross(edge_u, edge_v)
    norm = np.linalg.norm(normal)
    if norm < 1e-12:
        raise InvalidSpec(f"rect {index}: degenerate edges")
    return corner, edge_u, edge_v, count, canonical_sign(normal / norm)


def gen_synthetic(scene: dict, noise_sigma: float = 0.0, seed: int = 0):
    """Sample a scene into (points, truth labeling).

    Each rectangle is sampled uniformly with ``count`` points, perturbed by
    isotropic Gaussian noise of ``noise_sigma`` meters. Clutter points are
    uniform over ``clutter_bounds`` (default: the rectangles' bounding box)
    and labeled as unsegmented.
    """
    if noise_sigma < 0.0:
        raise InvalidSpec("noise_sigma must be nonnegative")
    rects = scene.get("rects", [])
    clutter = int(scene.get("clutter", 0))
    if not rects and clutter == 0:
        raise InvalidSpec("scene has no rectangles and no clutter")

    rng = np.random.default_rng(seed)
    chunks = []
    ids = []
    orients = []
    corners_seen = []
    up = scene.get("up", (0.0, 0.0, 1.0))
    tol = float(scene.get("orientation_tol_degrees", 7.0))
    for idx, rect in enumerate(rects):
        corner, eu, ev, count, normal = _rect_arrays(rect, idx)
        u = rng.uniform(0.0, 1.0, size=count)
        v = rng.uniform(0.0, 1.0, size=count)
        pts = corner + u[:, None] * eu + v[:, None] * ev
        if noise_sigma > 0.0:
            pts = pts + rng.normal(scale=noise_sigma, size=pts.shape)
        chunks.append(pts)
        ids.append(np.full(count, idx, dtype=np.int32))
        orients.append(np.full(count, int(classify_orientation(normal, up, tol)), dtype=np.int8))
        corners_seen.extend([corner, corner + eu, corner + ev, corner + eu + ev])

    if clutter > 0:
        bounds = scene.get("clutter_bounds")
        if bounds is not None:
            lo = np.asarray(bounds[0], dtype=np.float64).reshape(3)
            hi = np.asarray(bounds[1], dtype=np.float64).reshape(3)
        elif corners_seen:
            stack = np.asarray(corners_seen)
            lo, hi = stack.min(axis=0), stack.max(axis=0)
        else:
            raise InvalidSpec("clutter-only scenes need explicit clutter_bounds")
        if not np.all(hi > lo):
            raise InvalidSpec("clutter_bounds must span a positive volume")
        pts = rng.uniform(lo, hi, size=(clutter, 3))
        chunks.append(pts)
        ids.append(np.full(clutter, -1, dtype=np.int32))
        orients.append(np.full(clutter, int(Orientation.OTHER), dtype=np.int8))

    points = as_points(np.vstack(chunks))
    truth = SegmentLabeling(plane_ids=np.concatenate(ids), orientations=np.concatenate(orients))
    return points, truth


def box_room_scene(size: float = 3.5, points_per_face: int = 1000, clutter: int = 600) -> dict:
    """Scene dict for the six inner faces of an axis-aligned cubic room."""
    s = float(size)
    rects = [
        {"corner": [0, 0, 0], "edge_u": [s, 0, 0], "edge_v": [0, s, 0], "count": points_per_face},
        {"corner": [0, 0, s], "edge_u": [s, 0, 0], "edge_v": [0, s, 0], "count": points_per_face},
        {"corner": [0, 0, 0], "edge_u": [0, s, 0], "edge_v": [0, 0, s], "count": points_per_face},
        {"corner": [s, 0, 0], "edge_u": [0, s, 0], "edge_v": [0, 0, s], "count": points_per_face},
        {"corner": [0, 0, 0], "edge_u": [s, 0, 0], "edge_v": [0, 0, s], "count": points_per_face},
        {"corner": [0, s, 0], "edge_u": [s, 0, 0], "edge_v": [0, 0, s], "count": points_per_face},
    ]
    return {"rects": rects, "clutter": clutter}


def make_box_room(
    size: float = 3.5,
    points_per_face: int = 1000,
    clutter: int = 600,
    noise_sigma: float = 0.005,
    seed: int = 0,
):
    """The standard test fixture: a cubic room, optionally with clutter."""
    return gen_synthetic(box_room_scene(size, points_per_face, clutter), noise_sigma, seed)


def random_scene(n_planes: int, rng: np.random.Generator, clutter_fraction: float = 0.1,
                 min_parallel_gap: float = 0.25) -> dict:
    """A scene of randomly placed and oriented rectangles in a ~10 m domain.

    Rectangle sizes and densities are chosen so that both detectors have
    workable local point densities (around one to two hundred points per
    square meter). Near-parallel rectangles are kept at least
    ``min_parallel_gap`` apart in the normal direction: planes closer than
    the detectors' distance resolution are not distinguishable targets.
    """
    if n_planes < 1:
        raise InvalidSpec("need at least one plane")
    placed = []  # (center, normal)
    rects = []
    while len(rects) < n_planes:
        for _ in range(500):
            center = rng.uniform([-5.0, -5.0, 0.0], [5.0, 5.0, 4.0])
            kind = rng.uniform()
            if kind < 0.35:  # horizontal
                normal = np.array([0.0, 0.0, 1.0])
            elif kind < 0.75:  # vertical, random azimuth
                az = rng.uniform(0.0, 2.0 * np.pi)
                normal = np.array([np.cos(az), np.sin(az), 0.0])
            else:  # general orientation
                normal = rng.normal(size=3)
                normal /= np.linalg.norm(normal)
            ok = True
            for c_prev, n_prev in placed:
                if abs(float(normal @ n_prev)) < np.cos(np.radians(25.0)):
                    continue  # clearly different orientations never fuse
                gap = max(abs(float((center - c_prev) @ n_prev)),
                          abs(float((center - c_prev) @ normal)))
                if gap < min_parallel_gap:
                    ok = False
                    break
            if ok:
                break
        placed.append((center, normal))
        helper = np.array([0.0, 0.0, 1.0]) if abs(normal[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        u = np.cross(normal, helper)
        u /= np.linalg.norm(u)
        v = np.cross(normal, u)
        width = rng.uniform(2.6, 3.4)
        height = rng.uniform(2.6, 3.4)
        count = int(rng.integers(650, 1000))
        corner = center - 0.5 * width * u - 0.5 * height * v
        rects.append(
            {
                "corner": corner.tolist(),
                "edge_u": (width * u).tolist(),
                "edge_v": (height * v).tolist(),
                "count": count,
            }
        )
    total = sum(r["count"] for r in rects)
    return {
        "rects": rects,
        "clutter": int(clutter_fraction * total),
        "clutter_bounds": [[-5.5, -5.5, -1.0], [5.5, 5.5, 5.0]],
    }
