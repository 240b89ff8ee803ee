"""Command-line interface: synth, detect, gt, eval, bench.

Every parameter is a flag; a JSON config file can pre-fill them and explicit
flags win. Exit codes: 0 success, 2 parse error, 3 empty result where a
nonempty one was required.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .io import ParseError, load_cloud, load_labeling, save_labeled, save_labeling
from .metrics import SizeMismatch, classification_accuracy, segmentation_accuracy
from .pipeline import RunConfig, bench_table, run_bench, run_detect
from .synthetic import InvalidSpec, box_room_scene, gen_synthetic
from .truth import GtParams, generate_ground_truth

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_EMPTY = 3

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planeops", description="Plane detection in unorganized point clouds")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled cloud")
    p.add_argument("--scene", type=Path, help="scene description JSON")
    p.add_argument("--room-size", type=float, default=3.5, help="cubic room edge length (m)")
    p.add_argument("--points-per-face", type=int, default=1000)
    p.add_argument("--clutter", type=int, default=600)
    p.add_argument("--noise", type=float, default=0.005, help="isotropic noise sigma (m)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="output PLY path")

    p = sub.add_parser("detect", help="detect planes and write labeled outputs")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--config", type=Path, help="RunConfig JSON; flags override")
    p.add_argument("--detector", choices=("ops", "fspf"))
    p.add_argument("--seed", type=int)
    p.add_argument("--color-mode", choices=("segment", "orientation"), default="segment")
    p.add_argument("--sampling-rate", type=float, help="ops: fraction of points to orient")
    p.add_argument("--knn", type=int, help="ops: neighbors for normal estimation")
    p.add_argument("--dist-threshold", type=float, help="inlier distance (m), both detectors")
    p.add_argument("--min-inliers", type=int, help="ops: minimum sample support")
    p.add_argument("--probability", type=float, help="ops: RANSAC success probability")
    p.add_argument("--grouping", choices=("group_first", "detect_first"), help="ops strategy")
    p.add_argument("--sigma", type=float, help="ops: fixed Gaussian falloff for normals (m); default adapts per point")
    p.add_argument("--r1", type=float, help="fspf: hypothesis sphere radius (m)")
    p.add_argument("--r2", type=float, help="fspf: verification sphere radius (m)")
    p.add_argument("--n-loc", type=int, help="fspf: local samples per iteration")
    p.add_argument("--alpha-min", type=float, help="fspf: minimum inlier fraction")
    p.add_argument("--k-max", type=int, help="fspf: iteration cap")
    p.add_argument("--n-max", type=int, help="fspf: inlier-point budget")
    p.add_argument("--claim-full-sphere", action="store_true", default=None,
                   help="fspf: record the whole verification sphere as inliers")
    p.add_argument("--merge-angle", type=float, help="merge: normal angle threshold (deg)")
    p.add_argument("--merge-offset", type=float, help="merge: centroid offset threshold (m)")
    p.add_argument("--orientation-tol", type=float, help="degrees for horizontal/vertical classification")
    p.add_argument("--up", type=str, help="up axis as 'x,y,z' (default 0,0,1)")

    p = sub.add_parser("gt", help="region-growing ground truth for a cloud")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="labeling sidecar path")
    p.add_argument("--ply", type=Path, help="optional colored PLY output")
    p.add_argument("--gt-dist", type=float, default=0.05)
    p.add_argument("--gt-angle", type=float, default=7.0)
    p.add_argument("--min-plane-size", type=int, default=50)
    p.add_argument("--gt-knn", type=int, default=10)

    p = sub.add_parser("eval", help="score a predicted labeling against a reference")
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--json", type=Path, help="also write the scores as JSON")

    p = sub.add_parser("bench", help="aggregate accuracy/time over a cloud directory")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--configs", type=Path, required=True, help="JSON list of RunConfig dicts")
    p.add_argument("--gt-dir", type=Path, help="directory of *.labels.txt references")
    p.add_argument("--gen-gt", action="store_true", help="region-grow references on the fly")
    p.add_argument("--out", type=Path, help="write rows as JSON")
    return parser


def _detect_config(args) -> RunConfig:
    base = {}
    if args.config:
        base = json.loads(args.config.read_text())
    config = RunConfig.from_dict(base) if base else RunConfig()
    if args.detector:
        config.detector = args.detector
    if args.seed is not None:
        config.seed = args.seed

    ops_flags = {
        "sampling_rate": args.sampling_rate, "k": args.knn, "dist_threshold": args.dist_threshold,
        "min_inliers": args.min_inliers, "probability": args.probability, "grouping": args.grouping,
        "sigma": args.sigma,
    }
    fspf_flags = {
        "r1": args.r1, "r2": args.r2, "local_samples": args.n_loc,
        "min_inlier_fraction": args.alpha_min, "max_iterations": args.k_max,
        "max_inlier_points": args.n_max, "dist_threshold": args.dist_threshold,
        "claim_full_sphere": args.claim_full_sphere,
    }
    for name, value in ops_flags.items():
        if value is not None:
            setattr(config.ops, name, value)
    for name, value in fspf_flags.items():
        if value is not None:
            setattr(config.fspf, name, value)
    if args.merge_angle is not None:
        config.merge.angle_degrees = args.merge_angle
    if args.merge_offset is not None:
        config.merge.offset = args.merge_offset
    if args.orientation_tol is not None:
        config.orientation_tol_degrees = args.orientation_tol
        config.ops.orientation_tol_degrees = args.orientation_tol
    if args.up is not None:
        up = tuple(float(v) for v in args.up.split(","))
        config.up = up
        config.ops.up = up
    return config


def _cmd_synth(args) -> int:
    if args.scene:
        scene = json.loads(args.scene.read_text())
        noise = float(scene.get("noise_sigma", args.noise))
    else:
        scene = box_room_scene(args.room_size, args.points_per_face, args.clutter)
        noise = args.noise
    points, truth = gen_synthetic(scene, noise_sigma=noise, seed=args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_labeled(points, truth, args.out, mode="segment")
    print(f"wrote {points.shape[0]} points to {args.out} "
          f"({truth.segment_ids().size} segments, sidecar {args.out.with_suffix('.labels.txt')})")
    return EXIT_OK


def _cmd_detect(args) -> int:
    config = _detect_config(args)
    points = load_cloud(args.input)
    report = run_detect(points, config)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.input.stem
    labeled_ply = args.out / f"{stem}.labeled.ply"
    sidecar = args.out / f"{stem}.labels.txt"
    report_path = args.out / f"{stem}.report.json"
    save_labeled(points, report.labeling, labeled_ply, mode=args.color_mode, sidecar=False)
    save_labeling(report.labeling, sidecar)
    report_path.write_text(report.to_json() + "\n")
    print(f"{report.detector}: {report.post_merge_count} planes "
          f"({report.pre_merge_count} before merging) on {report.n_points} points "
          f"in {report.timings_ms['total']:.1f} ms")
    for plane in report.planes:
        print(f"  plane {plane.id}: {plane.inlier_count} points, {plane.orientation}")
    print(f"wrote {labeled_ply}, {sidecar}, {report_path}")
    if report.post_merge_count == 0:
        return EXIT_EMPTY
    return EXIT_OK


def _cmd_gt(args) -> int:
    points = load_cloud(args.input)
    params = GtParams(
        dist_threshold=args.gt_dist, normal_angle_degrees=args.gt_angle,
        min_plane_size=args.min_plane_size, k=args.gt_knn,
    )
    labeling = generate_ground_truth(points, params)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_labeling(labeling, args.out)
    if args.ply:
        save_labeled(points, labeling, args.ply, mode="segment", sidecar=False)
    print(f"{labeling.segment_ids().size} segments over {points.shape[0]} points -> {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    pred = load_labeling(args.pred)
    truth = load_labeling(args.truth)
    try:
        scores = {
            "classification_accuracy": classification_accuracy(pred, truth),
            "segmentation_accuracy": segmentation_accuracy(pred, truth),
        }
    except SizeMismatch as exc:
        raise ParseError(str(exc), path=args.pred) from exc
    print(f"classification accuracy: {scores['classification_accuracy']:.4f}")
    print(f"segmentation accuracy:   {scores['segmentation_accuracy']:.4f}")
    if args.json:
        args.json.write_text(json.dumps(scores, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    raw = json.loads(args.configs.read_text())
    if not isinstance(raw, list) or not raw:
        raise ParseError("configs file must hold a nonempty JSON list", path=args.configs)
    configs = [RunConfig.from_dict(d) for d in raw]
    try:
        rows = run_bench(args.dataset, configs, gt_dir=args.gt_dir, generate_gt=args.gen_gt)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    print(bench_table(rows))
    if args.out:
        args.out.write_text(json.dumps([r.to_dict() for r in rows], indent=2, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {
    "synth": _cmd_synth,
    "detect": _cmd_detect,
    "gt": _cmd_gt,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidSpec, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
