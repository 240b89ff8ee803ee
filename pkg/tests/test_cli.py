"""CLI subcommand tests through main(); checks outputs and exit codes."""

import json

import numpy as np
import pytest

from planeops import load_cloud, load_labeling
from planeops.cli import EXIT_EMPTY, EXIT_OK, EXIT_PARSE, main


@pytest.fixture
def room_files(tmp_path):
    out = tmp_path / "room.ply"
    code = main([
        "synth", "--room-size", "2.5", "--points-per-face", "400",
        "--clutter", "80", "--noise", "0.004", "--seed", "3", "--out", str(out),
    ])
    assert code == EXIT_OK
    return out, out.with_suffix(".labels.txt")


def test_synth_writes_cloud_and_truth(room_files):
    cloud_path, truth_path = room_files
    points = load_cloud(cloud_path)
    truth = load_labeling(truth_path)
    assert points.shape == (2480, 3)
    assert len(truth) == 2480
    assert truth.segment_ids().size == 6


def test_synth_from_scene_file(tmp_path):
    scene = {
        "rects": [{"corner": [0, 0, 0], "edge_u": [1, 0, 0], "edge_v": [0, 1, 0], "count": 50}],
        "noise_sigma": 0.0,
    }
    scene_path = tmp_path / "scene.json"
    scene_path.write_text(json.dumps(scene))
    out = tmp_path / "cloud.ply"
    assert main(["synth", "--scene", str(scene_path), "--out", str(out)]) == EXIT_OK
    assert load_cloud(out).shape == (50, 3)


def test_detect_eval_round_trip(room_files, tmp_path):
    cloud_path, truth_path = room_files
    outdir = tmp_path / "det"
    code = main([
        "detect", "--input", str(cloud_path), "--out", str(outdir),
        "--detector", "ops", "--sampling-rate", "0.08", "--knn", "10", "--seed", "1",
    ])
    assert code == EXIT_OK
    report = json.loads((outdir / "room.report.json").read_text())
    assert report["detector"] == "ops"
    assert report["post_merge_count"] >= 6 - 1
    labeled = outdir / "room.labeled.ply"
    sidecar = outdir / "room.labels.txt"
    assert labeled.exists() and sidecar.exists()

    scores = tmp_path / "scores.json"
    code = main(["eval", "--pred", str(sidecar), "--truth", str(truth_path), "--json", str(scores)])
    assert code == EXIT_OK
    data = json.loads(scores.read_text())
    assert 0.0 <= data["segmentation_accuracy"] <= 1.0
    assert 0.0 <= data["classification_accuracy"] <= 1.0


def test_detect_fspf(room_files, tmp_path):
    cloud_path, _ = room_files
    outdir = tmp_path / "det_fspf"
    code = main([
        "detect", "--input", str(cloud_path), "--out", str(outdir),
        "--detector", "fspf", "--r1", "0.07", "--r2", "0.14", "--seed", "1",
    ])
    assert code == EXIT_OK
    report = json.loads((outdir / "room.report.json").read_text())
    assert report["pre_merge_count"] >= report["post_merge_count"]


def test_detect_config_file_with_flag_override(room_files, tmp_path):
    cloud_path, _ = room_files
    config = {"detector": "ops", "ops": {"sampling_rate": 0.02, "k": 10}, "seed": 9}
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    outdir = tmp_path / "det_cfg"
    code = main([
        "detect", "--input", str(cloud_path), "--out", str(outdir),
        "--config", str(config_path), "--sampling-rate", "0.08",
    ])
    assert code == EXIT_OK
    report = json.loads((outdir / "room.report.json").read_text())
    assert report["params"]["ops"]["sampling_rate"] == 0.08  # flag wins
    assert report["params"]["seed"] == 9  # config survives


def test_detect_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.ply"
    bad.write_bytes(b"ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nend_header\n1\n")
    code = main(["detect", "--input", str(bad), "--out", str(tmp_path / "o")])
    assert code == EXIT_PARSE


def test_detect_empty_result_exit_code(tmp_path):
    rng = np.random.default_rng(0)
    noise = tmp_path / "noise.xyz"
    lines = "\n".join(f"{x} {y} {z}" for x, y, z in rng.uniform(0, 1, size=(400, 3)))
    noise.write_text(lines + "\n")
    code = main([
        "detect", "--input", str(noise), "--out", str(tmp_path / "o"),
        "--detector", "ops", "--sampling-rate", "0.2", "--knn", "10", "--min-inliers", "30",
    ])
    assert code == EXIT_EMPTY


def test_gt_command(room_files, tmp_path):
    cloud_path, _ = room_files
    out = tmp_path / "gt.labels.txt"
    code = main(["gt", "--input", str(cloud_path), "--out", str(out), "--min-plane-size", "50"])
    assert code == EXIT_OK
    labeling = load_labeling(out)
    assert labeling.segment_ids().size >= 5


def test_bench_command(room_files, tmp_path):
    cloud_path, truth_path = room_files
    configs = [
        {"name": "ops-fast", "detector": "ops", "ops": {"sampling_rate": 0.08, "k": 10}},
        {"name": "fspf", "detector": "fspf", "fspf": {"r1": 0.07, "r2": 0.14}},
    ]
    configs_path = tmp_path / "configs.json"
    configs_path.write_text(json.dumps(configs))
    out = tmp_path / "bench.json"
    code = main([
        "bench", "--dataset", str(cloud_path.parent), "--configs", str(configs_path),
        "--out", str(out),
    ])
    assert code == EXIT_OK
    rows = json.loads(out.read_text())
    assert len(rows) == 2
    assert rows[0]["n_clouds"] == 1


def test_bench_empty_dataset(tmp_path):
    configs_path = tmp_path / "configs.json"
    configs_path.write_text(json.dumps([{"detector": "ops"}]))
    empty = tmp_path / "empty"
    empty.mkdir()
    code = main(["bench", "--dataset", str(empty), "--configs", str(configs_path)])
    assert code == EXIT_EMPTY
