"""Format reader/writer/validator tests, including broken-variant findings."""

import json
from pathlib import Path

import numpy as np
import pytest

from tempocave import dataset_io
from tempocave.dataset_io import (
    load_dataset,
    parse_manifest,
    scan_root,
    validate_dataset,
    write_dataset,
)
from tempocave.errors import (
    InvariantViolation,
    MalformedDocument,
    MissingFile,
    SchemaViolation,
)

from conftest import write_files


# --- parse_manifest -----------------------------------------------------------


def test_parse_minimal_manifest():
    doc = (
        b'{"name":"p21_pre","num_nodes":3,"num_frames":2,'
        b'"default_layout":"anatomical","layouts":["anatomical"],"signed":true}'
    )
    m = parse_manifest(doc)
    assert m.num_nodes == 3
    assert m.num_frames == 2
    assert m.frame_duration_seconds is None


def test_parse_manifest_scan_session_scale():
    # 200 frames at 1.8 s/frame is a 360 s (~6 minute) session
    doc = json.dumps(
        {
            "name": "scan",
            "num_nodes": 90,
            "num_frames": 200,
            "frame_duration_seconds": 1.8,
            "default_layout": "anatomical",
            "layouts": ["anatomical", "isomap"],
            "signed": True,
        }
    ).encode()
    m = parse_manifest(doc)
    assert m.num_frames * m.frame_duration_seconds == pytest.approx(360.0)


def test_parse_manifest_default_layout_must_be_listed():
    doc = json.dumps(
        {
            "name": "x",
            "num_nodes": 1,
            "num_frames": 1,
            "default_layout": "isomap",
            "layouts": ["anatomical"],
            "signed": False,
        }
    ).encode()
    with pytest.raises(InvariantViolation):
        parse_manifest(doc)


@pytest.mark.parametrize(
    "mutate,exc",
    [
        (lambda d: d.pop("name"), SchemaViolation),
        (lambda d: d.update(num_nodes="3"), SchemaViolation),
        (lambda d: d.update(num_nodes=True), SchemaViolation),
        (lambda d: d.update(extra_field=1), SchemaViolation),
        (lambda d: d.update(num_nodes=0), InvariantViolation),
        (lambda d: d.update(num_frames=0), InvariantViolation),
        (lambda d: d.update(layouts=[]), SchemaViolation),  # empty then default missing
        (lambda d: d.update(layouts=["a", "a"], default_layout="a"), InvariantViolation),
        (lambda d: d.update(frame_duration_seconds=0), InvariantViolation),
    ],
)
def test_parse_manifest_rejections(mutate, exc):
    doc = {
        "name": "x",
        "num_nodes": 3,
        "num_frames": 2,
        "default_layout": "anatomical",
        "layouts": ["anatomical"],
        "signed": True,
    }
    mutate(doc)
    with pytest.raises((exc, InvariantViolation)):
        parse_manifest(json.dumps(doc).encode())


def test_parse_manifest_not_json():
    with pytest.raises(MalformedDocument):
        parse_manifest(b"not json {")


# --- load_dataset -------------------------------------------------------------


def test_load_tiny_fixture(tiny_dataset):
    c = load_dataset(tiny_dataset)
    assert c.num_nodes == 3
    assert c.num_frames == 2
    assert len(c.frames) == 2
    assert c.labels == ["supramarginal_L", "angular_L", "precuneus_M"]
    assert c.nodes[2].hemisphere == "midline"
    assert list(c.frame(0)) == [(0, 1, 0.5), (1, 2, -0.2)]
    assert np.array_equal(c.affiliations, [[0, 0], [0, 1], [1, 1]])


def test_load_short_affiliation_row_is_rectangularity(tmp_path, tiny_files):
    tiny_files["affiliations.csv"] = "id,f0,f1\n0,0,0\n1,0\n2,1,1\n"
    root = write_files(tmp_path / "bad", tiny_files)
    with pytest.raises(InvariantViolation, match="RECTANGULARITY"):
        load_dataset(root)


def test_load_static_single_frame(tmp_path, tiny_files):
    tiny_files["manifest.json"] = tiny_files["manifest.json"].replace(
        '"num_frames": 2', '"num_frames": 1'
    )
    tiny_files["affiliations.csv"] = "id,f0\n0,0\n1,0\n2,1\n"
    del tiny_files["frames/frame_0001.csv"]
    root = write_files(tmp_path / "static", tiny_files)
    c = load_dataset(root)
    assert c.num_frames == 1


def test_load_missing_nodes_file(tmp_path, tiny_files):
    del tiny_files["nodes.csv"]
    root = write_files(tmp_path / "nofile", tiny_files)
    with pytest.raises(MissingFile):
        load_dataset(root)


def test_load_is_side_effect_free(tiny_dataset):
    before = sorted(p.relative_to(tiny_dataset) for p in tiny_dataset.rglob("*"))
    mtimes = {p: p.stat().st_mtime_ns for p in tiny_dataset.rglob("*") if p.is_file()}
    load_dataset(tiny_dataset)
    after = sorted(p.relative_to(tiny_dataset) for p in tiny_dataset.rglob("*"))
    assert before == after
    assert mtimes == {p: p.stat().st_mtime_ns for p in tiny_dataset.rglob("*") if p.is_file()}


# --- validate_dataset -----------------------------------------------------------


def test_validate_clean_fixture(tiny_dataset):
    report = validate_dataset(tiny_dataset)
    assert report.ok
    assert report.findings == []


def test_validate_duplicate_edge(tmp_path, tiny_files):
    tiny_files["frames/frame_0000.csv"] = "source,target,weight\n0,1,0.5\n0,1,0.4\n"
    root = write_files(tmp_path / "dup", tiny_files)
    report = validate_dataset(root)
    assert not report.ok
    assert any(f.code == "DUPLICATE_EDGE" for f in report.errors)


def test_validate_negative_weight_when_unsigned(tmp_path, tiny_files):
    tiny_files["manifest.json"] = tiny_files["manifest.json"].replace(
        '"signed": true', '"signed": false'
    )
    root = write_files(tmp_path / "unsig", tiny_files)
    report = validate_dataset(root)
    assert any(f.code == "UNEXPECTED_NEGATIVE_WEIGHT" for f in report.errors)
    # location points at the offending row
    finding = next(f for f in report.errors if f.code == "UNEXPECTED_NEGATIVE_WEIGHT")
    assert finding.location == "frames/frame_0000.csv:3"


def test_validate_enumerates_all_findings(tmp_path, tiny_files):
    tiny_files["frames/frame_0000.csv"] = (
        "source,target,weight\n"
        "1,0,0.5\n"      # noncanonical
        "0,1,0.0\n"      # zero weight
        "0,5,0.3\n"      # unknown node
    )
    tiny_files["affiliations.csv"] = "id,f0,f1\n0,0,0\n1,0,-1\n2,1,1\n"
    root = write_files(tmp_path / "multi", tiny_files)
    report = validate_dataset(root)
    codes = {f.code for f in report.errors}
    assert {"NONCANONICAL_EDGE", "ZERO_WEIGHT", "UNKNOWN_NODE", "NEGATIVE_MODULE_ID"} <= codes


def test_noncanonical_edge_rejected_never_swapped(tmp_path, tiny_files):
    tiny_files["frames/frame_0001.csv"] = "source,target,weight\n2,0,0.9\n"
    root = write_files(tmp_path / "swap", tiny_files)
    with pytest.raises(InvariantViolation, match="NONCANONICAL_EDGE"):
        load_dataset(root)


def test_validate_missing_manifest_raises(tmp_path):
    (tmp_path / "empty_ds").mkdir()
    with pytest.raises(MissingFile):
        validate_dataset(tmp_path / "empty_ds")


@pytest.mark.parametrize(
    "rel,content,code",
    [
        ("nodes.csv", "id,label,region,hemisphere\n0,a,r,L\n1,a,r,R\n2,c,r,M\n", "DUPLICATE_LABEL"),
        ("nodes.csv", "id,label,region,hemisphere\n0,a,r,L\n1,b,r,X\n2,c,r,M\n", "BAD_HEMISPHERE"),
        ("nodes.csv", "id,label,region,hemisphere\n0,a,r,L\n1,b,r,R\n", "NODE_COUNT_MISMATCH"),
        ("nodes.csv", "id;label\n", "BAD_HEADER"),
        ("layouts/anatomical.csv", "id,x,y,z\n0,0,0,1\n1,1,0,0\n2,0,nan,0\n", "MALFORMED_ROW"),
        ("layouts/anatomical.csv", "id,x,y,z\n0,0,0,1\n1,1,0,0\n", "LAYOUT_NODE_MISMATCH"),
        ("frames/frame_0000.csv", "source,target,weight\n0,1,abc\n", "MALFORMED_ROW"),
        ("frames/frame_0000.csv", "source,target,weight\n0,0,0.5\n", "NONCANONICAL_EDGE"),
    ],
)
def test_validate_specific_findings(tmp_path, tiny_files, rel, content, code):
    tiny_files[rel] = content
    root = write_files(tmp_path / "case", tiny_files)
    report = validate_dataset(root)
    assert any(f.code == code for f in report.errors), [f.code for f in report.errors]


def test_load_iff_validate_ok(tmp_path, tiny_files):
    """load_dataset succeeds exactly when validate_dataset reports ok."""
    variants = {"good": dict(tiny_files)}
    bad1 = dict(tiny_files)
    bad1["affiliations.csv"] = "id,f0,f1\n0,0,0\n1,0\n2,1,1\n"
    variants["short_row"] = bad1
    bad2 = dict(tiny_files)
    bad2["frames/frame_0001.csv"] = "source,target,weight\n0,1,0\n"
    variants["zero_weight"] = bad2
    bad3 = dict(tiny_files)
    del bad3["layouts/anatomical.csv"]
    variants["missing_layout"] = bad3
    for name, files in variants.items():
        root = write_files(tmp_path / name, files)
        report = validate_dataset(root)
        if report.ok:
            load_dataset(root)  # must not raise
        else:
            with pytest.raises(Exception):
                load_dataset(root)


# --- scan_root -------------------------------------------------------------------


def test_scan_root_lexicographic(tmp_path, tiny_files):
    write_files(tmp_path / "b_post", tiny_files)
    write_files(tmp_path / "a_pre", tiny_files)
    summaries = scan_root(tmp_path)
    assert [s.id for s in summaries] == ["a_pre", "b_post"]
    assert all(s.ok for s in summaries)


def test_scan_root_broken_dataset_flagged(tmp_path, tiny_files):
    write_files(tmp_path / "good", tiny_files)
    broken = dict(tiny_files)
    broken["manifest.json"] = "{invalid"
    write_files(tmp_path / "broken", broken)
    summaries = scan_root(tmp_path)
    by_id = {s.id: s for s in summaries}
    assert by_id["good"].ok
    assert not by_id["broken"].ok
    assert by_id["broken"].num_nodes is None


def test_scan_root_empty(tmp_path):
    assert scan_root(tmp_path) == []


def test_scan_root_ignores_plain_dirs_and_files(tmp_path, tiny_files):
    write_files(tmp_path / "real", tiny_files)
    (tmp_path / "not_a_dataset").mkdir()
    (tmp_path / "stray.txt").write_text("hello")
    assert [s.id for s in scan_root(tmp_path)] == ["real"]


# --- round trip -----------------------------------------------------------------


def assert_models_equal(a, b):
    assert a.manifest == b.manifest
    assert a.nodes == b.nodes
    assert set(a.layouts) == set(b.layouts)
    for name in a.layouts:
        assert np.array_equal(a.layouts[name].positions, b.layouts[name].positions)
    assert np.array_equal(a.affiliations, b.affiliations)
    assert len(a.frames) == len(b.frames)
    for fa, fb in zip(a.frames, b.frames):
        assert fa.frame_index == fb.frame_index
        assert np.array_equal(fa.sources, fb.sources)
        assert np.array_equal(fa.targets, fb.targets)
        assert np.array_equal(fa.weights, fb.weights)


def test_round_trip_model_equality(tiny_dataset, tmp_path):
    c = load_dataset(tiny_dataset)
    out = tmp_path / "rewritten"
    write_dataset(c, out)
    assert_models_equal(c, load_dataset(out))


def test_round_trip_preserves_full_precision(tmp_path, tiny_files):
    tiny_files["frames/frame_0000.csv"] = (
        "source,target,weight\n0,1,0.123456789123456\n1,2,-0.000001\n"
    )
    root = write_files(tmp_path / "precise", tiny_files)
    c = load_dataset(root)
    out = tmp_path / "precise2"
    write_dataset(c, out)
    c2 = load_dataset(out)
    assert c2.frame(0).weights[0] == 0.123456789123456
    assert c2.frame(0).weights[1] == -0.000001


def test_write_refuses_overwrite(tiny_dataset):
    c = load_dataset(tiny_dataset)
    with pytest.raises(FileExistsError):
        write_dataset(c, tiny_dataset)


def test_format_real_positional():
    assert dataset_io.format_real(0.5) == "0.5"
    assert dataset_io.format_real(-0.000001) == "-0.000001"
    assert dataset_io.format_real(1.0) == "1.0"
    assert float(dataset_io.format_real(0.1)) == 0.1
