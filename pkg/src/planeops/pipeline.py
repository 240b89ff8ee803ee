"""End-to-end detection runs: detect, merge, label, time, report.

A run is fully determined by (config, seed, input); reports are identical
across repeats except for the timing fields. The JSON report schema produced
by :meth:`DetectionReport.to_dict` is the stability contract; the text
rendering is presentation only.
"""

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fspf import FspfParams, fspf_detect
from .geometry import Orientation, PlaneModel, as_points, as_unit_vector, classify_orientation
from .io import load_cloud, load_labeling
from .kdtree import KdTree
from .merge import MergeParams, merge_all
from .metrics import classification_accuracy, segmentation_accuracy
from .normals import SampleSet, estimate_normals, sample_indices
from .ops import OpsParams, detect_grouped
from .truth import GtParams, SegmentLabeling, generate_ground_truth

__all__ = [
    "BenchRow",
    "DetectionReport",
    "RunConfig",
    "assign_to_planes",
    "labeling_from_inliers",
    "run_bench",
    "run_detect",
]

logger = logging.getLogger(__name__)

STAGES = ("sampling", "normals", "detection", "merging")


@dataclass
class RunConfig:
    """One detector run: which detector plus every stage's parameters.

    ``seed`` overrides the per-detector seeds so a single flag controls the
    whole run. ``up`` and ``orientation_tol_degrees`` drive the post-merge
    orientation labels; the oriented-point detector's own grouping uses the
    up axis in its params (same default).
    """

    detector: str = "ops"
    ops: OpsParams = field(default_factory=OpsParams)
    fspf: FspfParams = field(default_factory=FspfParams)
    merge: MergeParams = field(default_factory=MergeParams)
    gt: GtParams = field(default_factory=GtParams)
    up: tuple = (0.0, 0.0, 1.0)
    orientation_tol_degrees: float = 7.0
    seed: int = 0
    name: str | None = None

    def __post_init__(self):
        if self.detector not in ("ops", "fspf"):
            raise ValueError(f"unknown detector {self.detector!r}")
        as_unit_vector(self.up)

    @property
    def detector_params(self):
        return self.ops if self.detector == "ops" else self.fspf

    def to_dict(self) -> dict:
        return {
            "detector": self.detector,
            "seed": self.seed,
            "name": self.name,
            "up": list(self.up),
            "orientation_tol_degrees": self.orientation_tol_degrees,
            self.detector: _params_dict(self.detector_params),
            "merge": _params_dict(self.merge),
            "gt": _params_dict(self.gt),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        kwargs = {
            "detector": d.get("detector", "ops"),
            "seed": int(d.get("seed", 0)),
            "name": d.get("name"),
        }
        if "up" in d:
            kwargs["up"] = tuple(d["up"])
        if "orientation_tol_degrees" in d:
            kwargs["orientation_tol_degrees"] = float(d["orientation_tol_degrees"])
        for key, klass in (("ops", OpsParams), ("fspf", FspfParams), ("merge", MergeParams), ("gt", GtParams)):
            if key in d and d[key] is not None:
                params = dict(d[key])
                if "up" in params:
                    params["up"] = tuple(params["up"])
                kwargs[key] = klass(**params)
        return cls(**kwargs)


def _params_dict(params) -> dict:
    out = {}
    for f in dataclasses.fields(params):
        v = getattr(params, f.name)
        if isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


@dataclass
class PlaneSummary:
    id: int
    centroid: list
    normal: list
    inlier_count: int
    orientation: str


@dataclass
class DetectionReport:
    """Everything a run produced: plane summaries, labeling, timings."""

    detector: str
    n_points: int
    pre_merge_count: int
    post_merge_count: int
    planes: list
    labeling: SegmentLabeling
    timings_ms: dict
    params: dict

    def to_dict(self) -> dict:
        return {
            "detector": self.detector,
            "n_points": self.n_points,
            "pre_merge_count": self.pre_merge_count,
            "post_merge_count": self.post_merge_count,
            "planes": [dataclasses.asdict(p) for p in self.planes],
            "timings_ms": self.timings_ms,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def assign_to_planes(points: np.ndarray, planes: list[PlaneModel], dist_threshold: float,
                     up=(0.0, 0.0, 1.0), tol_degrees: float = 7.0) -> SegmentLabeling:
    """Label every point by its nearest plane, when within the threshold.

    Used for detectors whose recorded inliers are sparse samples rather than
    full verification sets. Plane ids follow list order; unclaimed points
    stay unsegmented.
    """
    n = points.shape[0]
    if not planes:
        return SegmentLabeling.all_other(n)
    ids = np.full(n, -1, dtype=np.int32)
    best = np.full(n, np.inf)
    for pid, plane in enumerate(planes):
        d = np.abs((points - plane.centroid) @ plane.normal)
        better = (d < dist_threshold) & (d < best)
        ids[better] = pid
        best[better] = d[better]
    return _labeling_with_orientations(n, ids, planes, up, tol_degrees)


def labeling_from_inliers(n: int, planes: list[PlaneModel], up=(0.0, 0.0, 1.0),
                          tol_degrees: float = 7.0) -> SegmentLabeling:
    """Label points from the planes' recorded (disjoint) inlier sets."""
    ids = np.full(n, -1, dtype=np.int32)
    for pid, plane in enumerate(planes):
        ids[plane.inliers] = pid
    return _labeling_with_orientations(n, ids, planes, up, tol_degrees)


def _labeling_with_orientations(n, ids, planes, up, tol_degrees) -> SegmentLabeling:
    up = as_unit_vector(up)
    orients = np.full(n, int(Orientation.OTHER), dtype=np.int8)
    for pid, plane in enumerate(planes):
        orient = classify_orientation(plane.normal, up, tol_degrees)
        orients[ids == pid] = int(orient)
    return SegmentLabeling(plane_ids=ids, orientations=orients)


def run_detect(points, config: RunConfig) -> DetectionReport:
    """Detect planes in a cloud with the configured detector, then merge,
    label each point, and assemble the report.

    Oriented-point runs label points by the planes' verified inlier sets;
    local-sampling runs assign every point to its nearest merged plane within
    the distance threshold, since their recorded inliers are sparse draws.
    """
    points = as_points(points)
    rng = np.random.default_rng(config.seed)
    timings = dict.fromkeys(STAGES, 0.0)

    t0 = time.perf_counter()
    kd = KdTree(points)
    if config.detector == "ops":
        p = config.ops
        idx = sample_indices(points.shape[0], p.sampling_rate, rng)
        timings["sampling"] = time.perf_counter() - t0

        t1 = time.perf_counter()
        normals, _, valid = estimate_normals(points, kd, idx, p.k, p.sigma)
        kept = idx[valid]
        samples = SampleSet(
            indices=kept, positions=points[kept], normals=normals[valid],
            sampling_rate=p.sampling_rate, k=p.k, cloud_size=points.shape[0],
            n_degenerate=int(idx.size - kept.size),
        )
        timings["normals"] = time.perf_counter() - t1

        t2 = time.perf_counter()
        labeled = detect_grouped(points, p, rng=rng, samples=samples)
        raw_planes = [plane for plane, _ in labeled]
        timings["detection"] = time.perf_counter() - t2
        threshold = p.dist_threshold
    else:
        p = config.fspf
        timings["sampling"] = time.perf_counter() - t0
        t2 = time.perf_counter()
        raw_planes = fspf_detect(points, kd, p, rng=rng)
        timings["detection"] = time.perf_counter() - t2
        threshold = p.dist_threshold

    t3 = time.perf_counter()
    merged = merge_all(raw_planes, points, config.merge)
    timings["merging"] = time.perf_counter() - t3

    up, tol = config.up, config.orientation_tol_degrees
    if config.detector == "ops":
        labeling = labeling_from_inliers(points.shape[0], merged, up, tol)
    else:
        labeling = assign_to_planes(points, merged, threshold, up, tol)

    up_vec = as_unit_vector(up)
    summaries = [
        PlaneSummary(
            id=pid,
            centroid=[float(v) for v in plane.centroid],
            normal=[float(v) for v in plane.normal],
            inlier_count=plane.inlier_count,
            orientation=classify_orientation(plane.normal, up_vec, tol).name.lower(),
        )
        for pid, plane in enumerate(merged)
    ]
    timings_ms = {k: 1000.0 * v for k, v in timings.items()}
    timings_ms["total"] = sum(timings_ms.values())
    return DetectionReport(
        detector=config.detector,
        n_points=int(points.shape[0]),
        pre_merge_count=len(raw_planes),
        post_merge_count=len(merged),
        planes=summaries,
        labeling=labeling,
        timings_ms=timings_ms,
        params=config.to_dict(),
    )


@dataclass
class BenchRow:
    """Aggregate of one config over a dataset; plain arithmetic means."""

    config_name: str
    n_clouds: int
    n_skipped: int
    mean_classification: float
    mean_segmentation: float
    mean_timings_ms: dict
    mean_pre_merge: float
    mean_post_merge: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def run_bench(dataset_dir, configs: list[RunConfig], gt_dir=None, generate_gt: bool = False,
              gt_params: GtParams | None = None) -> list[BenchRow]:
    """Score each config over every readable cloud in a directory.

    Reference labelings come from ``<stem>.labels.txt`` sidecars in
    ``gt_dir`` (or next to the clouds), or are region-grown on the fly with
    ``generate_gt=True``. Unreadable clouds are skipped and counted; the run
    fails only when no cloud could be processed.
    """
    dataset_dir = Path(dataset_dir)
    paths = sorted(p for p in dataset_dir.iterdir() if p.suffix.lower() in (".ply", ".xyz"))
    if gt_params is None:
        gt_params = GtParams()
    per_config: list[list] = [[] for _ in configs]
    skipped = 0
    for path in paths:
        try:
            points = load_cloud(path)
            truth = _truth_for(path, points, gt_dir, generate_gt, gt_params)
            cloud_results = []
            for config in configs:
                report = run_detect(points, config)
                cloud_results.append(
                    (
                        classification_accuracy(report.labeling, truth),
                        segmentation_accuracy(report.labeling, truth),
                        report.timings_ms,
                        report.pre_merge_count,
                        report.post_merge_count,
                    )
                )
        except Exception as exc:  # noqa: BLE001 - skip-and-count is the contract
            skipped += 1
            logger.warning("skipping %s: %s", path, exc)
            continue
        for ci, result in enumerate(cloud_results):
            per_config[ci].append(result)
    n_done = len(per_config[0]) if configs else 0
    if n_done == 0:
        raise ValueError(f"no cloud in {dataset_dir} could be processed ({skipped} skipped)")

    rows = []
    for config, results in zip(configs, per_config):
        name = config.name or f"{config.detector}"
        timing_keys = results[0][2].keys()
        rows.append(
            BenchRow(
                config_name=name,
                n_clouds=len(results),
                n_skipped=skipped,
                mean_classification=float(np.mean([r[0] for r in results])),
                mean_segmentation=float(np.mean([r[1] for r in results])),
                mean_timings_ms={k: float(np.mean([r[2][k] for r in results])) for k in timing_keys},
                mean_pre_merge=float(np.mean([r[3] for r in results])),
                mean_post_merge=float(np.mean([r[4] for r in results])),
            )
        )
    return rows


def _truth_for(path: Path, points, gt_dir, generate_gt, gt_params) -> SegmentLabeling:
    candidates = []
    if gt_dir is not None:
        candidates.append(Path(gt_dir) / (path.stem + ".labels.txt"))
    candidates.append(path.with_suffix(".labels.txt"))
    for cand in candidates:
        if cand.exists():
            truth = load_labeling(cand)
            if len(truth) != points.shape[0]:
                raise ValueError(f"labeling {cand} has {len(truth)} entries for {points.shape[0]} points")
            return truth
    if generate_gt:
        return generate_ground_truth(points, gt_params)
    raise FileNotFoundError(f"no ground-truth labeling for {path}")


def bench_table(rows: list[BenchRow]) -> str:
    """Aligned text rendering of bench results."""
    header = f"{'config':<18} {'clouds':>6} {'class%':>8} {'segm%':>8} {'detect ms':>10} {'merge ms':>9} {'total ms':>9} {'pre':>7} {'post':>7}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.config_name:<18} {r.n_clouds:>6} {100 * r.mean_classification:>8.2f} "
            f"{100 * r.mean_segmentation:>8.2f} {r.mean_timings_ms.get('detection', 0.0):>10.1f} "
            f"{r.mean_timings_ms.get('merging', 0.0):>9.1f} {r.mean_timings_ms.get('total', 0.0):>9.1f} "
            f"{r.mean_pre_merge:>7.1f} {r.mean_post_merge:>7.1f}"
        )
    return "\n".join(lines)
