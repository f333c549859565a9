"""CLI subcommand tests: exit codes, output contracts, determinism."""

import json

import pytest

from tempocave.cli import run

from conftest import TINY_FILES, write_files
from test_synth import dir_bytes


@pytest.fixture
def tiny(tmp_path):
    return write_files(tmp_path / "tiny", dict(TINY_FILES))


def test_validate_ok(tiny, capsys):
    assert run(["validate", str(tiny)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is True
    assert doc["findings"] == []


def test_validate_failure_exit_code(tmp_path, capsys):
    files = dict(TINY_FILES)
    files["frames/frame_0000.csv"] = "source,target,weight\n0,1,0\n"
    broken = write_files(tmp_path / "broken", files)
    assert run(["validate", str(broken)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] is False
    assert out["findings"][0]["code"] == "ZERO_WEIGHT"


def test_list_order(tmp_path, capsys):
    write_files(tmp_path / "b_post", dict(TINY_FILES))
    write_files(tmp_path / "a_pre", dict(TINY_FILES))
    assert run(["list", str(tmp_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [d["id"] for d in doc] == ["a_pre", "b_post"]


def test_metrics_csv_contract(tiny, tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert run(["metrics", str(tiny), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "id,label,flexibility_raw,flexibility_norm,dominant_module,"
        "dwelling_frames,longest_run_frames,dwelling_seconds"
    )
    assert lines[1] == "0,supramarginal_L,0,0.000000,0,2,2,3.600000"
    assert lines[2] == "1,angular_L,1,1.000000,0,1,1,1.800000"


def test_metrics_seconds_flag_fails_without_duration(tmp_path, capsys):
    files = dict(TINY_FILES)
    files["manifest.json"] = files["manifest.json"].replace(
        ' "frame_duration_seconds": 1.8,', ""
    )
    ds = write_files(tmp_path / "nodur", files)
    assert run(["metrics", str(ds), "--seconds"]) == 1
    assert run(["metrics", str(ds)]) == 0
    out = capsys.readouterr().out
    assert "dwelling_seconds" not in out.splitlines()[0]


def test_synth_deterministic_directories(tmp_path, capsys):
    args = ["synth", "--nodes", "10", "--frames", "20", "--modules", "3",
            "--switch-prob", "0.5", "--seed", "7"]
    assert run(args + ["--out", str(tmp_path / "s1")]) == 0
    assert run(args + ["--out", str(tmp_path / "s2")]) == 0
    assert dir_bytes(tmp_path / "s1") == dir_bytes(tmp_path / "s2")


def test_compare_output(tiny, tmp_path, capsys):
    out = tmp_path / "cmp.json"
    assert run(["compare", str(tiny), str(tiny), "--out", str(out), "--relabel"]) == 0
    doc = json.loads(out.read_text())
    assert doc["agreement"] == [1.0, 1.0]
    assert all(d["flexibility_delta_raw"] == 0 for d in doc["node_deltas"])


def test_bundle_output(tiny, tmp_path):
    out = tmp_path / "bundle.json"
    assert run(["bundle", str(tiny), "--frame", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert [(b["source"], b["target"]) for b in doc] == [(0, 1), (1, 2)]


def test_bundle_min_abs_weight(tiny, capsys):
    assert run(["bundle", str(tiny), "--frame", "0", "--min-abs-weight", "0.3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [(b["source"], b["target"]) for b in doc] == [(0, 1)]


def test_bundle_bad_frame(tiny, capsys):
    assert run(["bundle", str(tiny), "--frame", "99"]) == 1


def test_missing_dataset_is_error_not_traceback(tmp_path, capsys):
    assert run(["validate", str(tmp_path / "ghost")]) == 1
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2


def test_synth_refuses_existing_dataset(tmp_path, tiny, capsys):
    args = ["synth", "--nodes", "4", "--frames", "2", "--modules", "2",
            "--switch-prob", "0.1", "--seed", "1", "--out", str(tiny)]
    assert run(args) == 1
