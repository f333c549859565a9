"""On-disk dataset format: loading, validation, enumeration, and writing.

A dataset is a directory::

    <dataset>/manifest.json            dataset-level fields (see Manifest)
    <dataset>/nodes.csv                id,label,region,hemisphere   (hemisphere L/R/M)
    <dataset>/layouts/<name>.csv       id,x,y,z                     one file per layout
    <dataset>/affiliations.csv         id,f0,...,f{T-1}             module id per frame
    <dataset>/frames/frame_<t>.csv     source,target,weight         t zero-padded to 4 digits

All files are UTF-8, comma-separated with a header line, LF line endings.
Edges are stored in canonical ``source < target`` form with finite nonzero
weights; absence of a pair encodes weight zero.  The reader is strict:
malformed rows and invariant violations are errors, never repaired.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    InvariantViolation,
    MalformedDocument,
    MissingFile,
    SchemaViolation,
)
from .model import (
    HEMISPHERE_CODES,
    HEMISPHERE_LETTERS,
    DatasetSummary,
    DynamicConnectome,
    EdgeFrame,
    Finding,
    Layout,
    Manifest,
    NodeMeta,
    ValidationReport,
)

_INT_RE = re.compile(r"^[+-]?[0-9]+$")

_MANIFEST_FIELDS = {
    "name": str,
    "num_nodes": int,
    "num_frames": int,
    "default_layout": str,
    "layouts": list,
    "signed": bool,
}

# codes that load_dataset surfaces as something other than InvariantViolation
_CODE_EXCEPTIONS = {
    "MISSING_FILE": MissingFile,
    "MALFORMED_JSON": MalformedDocument,
    "BAD_ENCODING": MalformedDocument,
    "BAD_HEADER": MalformedDocument,
    "MALFORMED_ROW": MalformedDocument,
    "SCHEMA_VIOLATION": SchemaViolation,
}


def frame_filename(t: int) -> str:
    return f"frame_{t:04d}.csv"


def parse_manifest(data: bytes) -> Manifest:
    """Parse manifest.json content into a validated Manifest.

    Raises MalformedDocument for undecodable/unparseable input,
    SchemaViolation for missing, extra, or ill-typed fields, and
    InvariantViolation when field values break Manifest invariants.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedDocument(f"manifest is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("manifest must be a JSON object")

    allowed = set(_MANIFEST_FIELDS) | {"frame_duration_seconds"}
    extra = set(doc) - allowed
    if extra:
        raise SchemaViolation(f"unknown manifest fields: {sorted(extra)}")
    for name, typ in _MANIFEST_FIELDS.items():
        if name not in doc:
            raise SchemaViolation(f"manifest missing field {name!r}")
        value = doc[name]
        if typ is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise SchemaViolation(f"manifest field {name!r} must be an integer")
        elif not isinstance(value, typ):
            raise SchemaViolation(f"manifest field {name!r} must be {typ.__name__}")
    layouts = doc["layouts"]
    if not all(isinstance(x, str) for x in layouts):
        raise SchemaViolation("manifest field 'layouts' must be a list of strings")
    duration = doc.get("frame_duration_seconds")
    if duration is not None:
        if isinstance(duration, bool) or not isinstance(duration, (int, float)):
            raise SchemaViolation("manifest field 'frame_duration_seconds' must be a number")
        duration = float(duration)

    return Manifest(
        name=doc["name"],
        num_nodes=doc["num_nodes"],
        num_frames=doc["num_frames"],
        default_layout=doc["default_layout"],
        layouts=tuple(layouts),
        signed=doc["signed"],
        frame_duration_seconds=duration,
    )


class _Reader:
    """Single-pass reader that collects every finding instead of stopping."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.findings: list[Finding] = []

    def error(self, code: str, message: str, location: str) -> None:
        self.findings.append(Finding("error", code, message, location))

    def warning(self, code: str, message: str, location: str) -> None:
        self.findings.append(Finding("warning", code, message, location))

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    # --- file plumbing -----------------------------------------------------

    def _read_lines(self, rel: str) -> Optional[list[str]]:
        p = self.path / rel
        if not p.is_file():
            self.error("MISSING_FILE", f"required file {rel} is missing", rel)
            return None
        try:
            text = p.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            self.error("BAD_ENCODING", f"not UTF-8: {exc}", rel)
            return None
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        return [ln.rstrip("\r") for ln in lines]

    def _rows(self, rel: str, header: list[str]) -> Optional[list[tuple[int, list[str]]]]:
        """Return (line_number, fields) pairs after checking the header."""
        lines = self._read_lines(rel)
        if lines is None:
            return None
        if not lines:
            self.error("BAD_HEADER", "file is empty, expected a header line", rel)
            return None
        got = self._split(rel, 1, lines[0])
        if got != header:
            self.error(
                "BAD_HEADER",
                f"expected header {','.join(header)!r}, got {lines[0]!r}",
                f"{rel}:1",
            )
            return None
        out = []
        for i, line in enumerate(lines[1:], start=2):
            fields = self._split(rel, i, line)
            if fields is not None:
                out.append((i, fields))
        return out

    def _split(self, rel: str, line_no: int, line: str) -> Optional[list[str]]:
        try:
            return next(csv.reader([line]))
        except (csv.Error, StopIteration):
            self.error("MALFORMED_ROW", f"unparseable CSV row {line!r}", f"{rel}:{line_no}")
            return None

    def _int(self, s: str, what: str, loc: str) -> Optional[int]:
        if not _INT_RE.match(s):
            self.error("MALFORMED_ROW", f"{what} must be an integer, got {s!r}", loc)
            return None
        return int(s)

    def _real(self, s: str, what: str, loc: str) -> Optional[float]:
        try:
            value = float(s)
        except ValueError:
            self.error("MALFORMED_ROW", f"{what} must be a decimal real, got {s!r}", loc)
            return None
        if not math.isfinite(value):
            self.error("MALFORMED_ROW", f"{what} must be finite, got {s!r}", loc)
            return None
        return value

    # --- sections ------------------------------------------------------------

    def read_manifest(self) -> Optional[Manifest]:
        p = self.path / "manifest.json"
        if not p.is_file():
            raise MissingFile(f"{p} not found")
        try:
            return parse_manifest(p.read_bytes())
        except MalformedDocument as exc:
            self.error("MALFORMED_JSON", str(exc), "manifest.json")
        except SchemaViolation as exc:
            self.error("SCHEMA_VIOLATION", str(exc), "manifest.json")
        except InvariantViolation as exc:
            self.error("INVARIANT_VIOLATION", str(exc), "manifest.json")
        return None

    def read_nodes(self, manifest: Manifest) -> Optional[tuple[NodeMeta, ...]]:
        rel = "nodes.csv"
        rows = self._rows(rel, ["id", "label", "region", "hemisphere"])
        if rows is None:
            return None
        n = manifest.num_nodes
        by_id: dict[int, NodeMeta] = {}
        labels: dict[str, int] = {}
        errors_before = len(self.findings)
        for line_no, fields in rows:
            loc = f"{rel}:{line_no}"
            if len(fields) != 4:
                self.error("MALFORMED_ROW", f"expected 4 fields, got {len(fields)}", loc)
                continue
            node_id = self._int(fields[0], "id", loc)
            if node_id is None:
                continue
            label, region, hemi = fields[1], fields[2], fields[3]
            if not (0 <= node_id < n):
                self.error("NODE_ID_OUT_OF_RANGE", f"id {node_id} outside [0, {n})", loc)
                continue
            if node_id in by_id:
                self.error("DUPLICATE_NODE_ID", f"id {node_id} appears more than once", loc)
                continue
            if not label:
                self.error("MALFORMED_ROW", "label must be nonempty", loc)
                continue
            if label in labels:
                self.error("DUPLICATE_LABEL", f"label {label!r} already used by id {labels[label]}", loc)
                continue
            if hemi not in HEMISPHERE_CODES:
                self.error("BAD_HEMISPHERE", f"hemisphere must be L, R, or M, got {hemi!r}", loc)
                continue
            labels[label] = node_id
            by_id[node_id] = NodeMeta(node_id, label, region, HEMISPHERE_CODES[hemi])
        missing = sorted(set(range(n)) - set(by_id))
        if missing:
            self.error(
                "NODE_COUNT_MISMATCH",
                f"ids must be contiguous 0..{n - 1}; missing {missing[:8]}"
                + ("..." if len(missing) > 8 else ""),
                rel,
            )
        if len(self.findings) != errors_before:
            return None
        return tuple(by_id[i] for i in range(n))

    def read_layout(self, manifest: Manifest, name: str) -> Optional[Layout]:
        rel = f"layouts/{name}.csv"
        rows = self._rows(rel, ["id", "x", "y", "z"])
        if rows is None:
            return None
        n = manifest.num_nodes
        positions = np.full((n, 3), np.nan)
        seen: set[int] = set()
        errors_before = len(self.findings)
        for line_no, fields in rows:
            loc = f"{rel}:{line_no}"
            if len(fields) != 4:
                self.error("MALFORMED_ROW", f"expected 4 fields, got {len(fields)}", loc)
                continue
            node_id = self._int(fields[0], "id", loc)
            if node_id is None:
                continue
            if not (0 <= node_id < n):
                self.error("NODE_ID_OUT_OF_RANGE", f"id {node_id} outside [0, {n})", loc)
                continue
            if node_id in seen:
                self.error("DUPLICATE_NODE_ID", f"id {node_id} appears more than once", loc)
                continue
            seen.add(node_id)
            coords = [self._real(fields[k], "xyz"[k - 1], loc) for k in (1, 2, 3)]
            if any(c is None for c in coords):
                continue
            positions[node_id] = coords
        missing = sorted(set(range(n)) - seen)
        if missing:
            self.error(
                "LAYOUT_NODE_MISMATCH",
                f"layout must place every node; missing {missing[:8]}"
                + ("..." if len(missing) > 8 else ""),
                rel,
            )
        if len(self.findings) != errors_before:
            return None
        return Layout(name, positions)

    def read_affiliations(self, manifest: Manifest) -> Optional[np.ndarray]:
        rel = "affiliations.csv"
        n, t = manifest.num_nodes, manifest.num_frames
        header = ["id"] + [f"f{k}" for k in range(t)]
        rows = self._rows(rel, header)
        if rows is None:
            return None
        aff = np.zeros((n, t), dtype=np.int64)
        seen: set[int] = set()
        errors_before = len(self.findings)
        for line_no, fields in rows:
            loc = f"{rel}:{line_no}"
            if len(fields) != t + 1:
                self.error(
                    "RECTANGULARITY",
                    f"expected {t} module ids per node, got {len(fields) - 1}",
                    loc,
                )
                continue
            node_id = self._int(fields[0], "id", loc)
            if node_id is None:
                continue
            if not (0 <= node_id < n):
                self.error("NODE_ID_OUT_OF_RANGE", f"id {node_id} outside [0, {n})", loc)
                continue
            if node_id in seen:
                self.error("DUPLICATE_NODE_ID", f"id {node_id} appears more than once", loc)
                continue
            seen.add(node_id)
            good = True
            for k, s in enumerate(fields[1:]):
                module = self._int(s, f"f{k}", loc)
                if module is None:
                    good = False
                    break
                if module < 0:
                    self.error("NEGATIVE_MODULE_ID", f"module id {module} in column f{k}", loc)
                    good = False
                    break
                aff[node_id, k] = module
            if not good:
                continue
        missing = sorted(set(range(n)) - seen)
        if missing:
            self.error(
                "NODE_COUNT_MISMATCH",
                f"one row per node required; missing {missing[:8]}"
                + ("..." if len(missing) > 8 else ""),
                rel,
            )
        if len(self.findings) != errors_before:
            return None
        return aff

    def read_frame(self, manifest: Manifest, t: int) -> Optional[EdgeFrame]:
        rel = f"frames/{frame_filename(t)}"
        rows = self._rows(rel, ["source", "target", "weight"])
        if rows is None:
            return None
        n = manifest.num_nodes
        seen_pairs: set[tuple[int, int]] = set()
        sources, targets, weights = [], [], []
        errors_before = len(self.findings)
        for line_no, fields in rows:
            loc = f"{rel}:{line_no}"
            if len(fields) != 3:
                self.error("MALFORMED_ROW", f"expected 3 fields, got {len(fields)}", loc)
                continue
            s = self._int(fields[0], "source", loc)
            u = self._int(fields[1], "target", loc)
            w = self._real(fields[2], "weight", loc)
            if s is None or u is None or w is None:
                continue
            if not (0 <= s < n and 0 <= u < n):
                self.error("UNKNOWN_NODE", f"edge ({s},{u}) has an endpoint outside [0, {n})", loc)
                continue
            if not s < u:
                # canonical form is strict: (a,b) with a >= b is rejected, never swapped
                self.error("NONCANONICAL_EDGE", f"edge ({s},{u}) must satisfy source < target", loc)
                continue
            if (s, u) in seen_pairs:
                self.error("DUPLICATE_EDGE", f"edge ({s},{u}) appears more than once", loc)
                continue
            if w == 0.0:
                self.error("ZERO_WEIGHT", f"edge ({s},{u}) has weight 0 (absence encodes zero)", loc)
                continue
            if w < 0 and not manifest.signed:
                self.error(
                    "UNEXPECTED_NEGATIVE_WEIGHT",
                    f"edge ({s},{u}) has weight {w} but manifest.signed is false",
                    loc,
                )
                continue
            seen_pairs.add((s, u))
            sources.append(s)
            targets.append(u)
            weights.append(w)
        if len(self.findings) != errors_before:
            return None
        return EdgeFrame(t, np.array(sources, dtype=np.int64),
                         np.array(targets, dtype=np.int64),
                         np.array(weights, dtype=np.float64))

    def check_unreferenced(self, manifest: Manifest) -> None:
        layouts_dir = self.path / "layouts"
        if layouts_dir.is_dir():
            known = {f"{name}.csv" for name in manifest.layouts}
            for p in sorted(layouts_dir.iterdir()):
                if p.name not in known:
                    self.warning("UNREFERENCED_FILE", "not named in manifest.layouts",
                                 f"layouts/{p.name}")
        frames_dir = self.path / "frames"
        if frames_dir.is_dir():
            known = {frame_filename(t) for t in range(manifest.num_frames)}
            for p in sorted(frames_dir.iterdir()):
                if p.name not in known:
                    self.warning("UNREFERENCED_FILE", "frame index outside manifest.num_frames",
                                 f"frames/{p.name}")

    def read_all(self) -> Optional[DynamicConnectome]:
        manifest = self.read_manifest()
        if manifest is None:
            return None
        nodes = self.read_nodes(manifest)
        layouts = {}
        for name in manifest.layouts:
            layout = self.read_layout(manifest, name)
            if layout is not None:
                layouts[name] = layout
        affiliations = self.read_affiliations(manifest)
        frames = [self.read_frame(manifest, t) for t in range(manifest.num_frames)]
        self.check_unreferenced(manifest)
        if not self.ok or nodes is None or affiliations is None or any(f is None for f in frames):
            return None
        return DynamicConnectome(
            manifest=manifest,
            nodes=nodes,
            layouts=layouts,
            frames=tuple(frames),
            affiliations=affiliations,
        )


def validate_dataset(path) -> ValidationReport:
    """Check a dataset directory and enumerate ALL findings.

    Does not stop at the first problem; ``report.ok`` is True exactly when
    load_dataset would succeed.  Raises MissingFile only when manifest.json
    itself is absent.
    """
    reader = _Reader(Path(path))
    reader.read_all()
    return ValidationReport(path=reader.path, findings=reader.findings)


def load_dataset(path) -> DynamicConnectome:
    """Load and fully cross-validate a dataset directory.

    Raises the typed error for the first finding (with file:line location);
    loading never modifies anything on disk.
    """
    reader = _Reader(Path(path))
    connectome = reader.read_all()
    errors = [f for f in reader.findings if f.severity == "error"]
    if errors:
        first = errors[0]
        exc_type = _CODE_EXCEPTIONS.get(first.code, InvariantViolation)
        raise exc_type(f"{first.location}: [{first.code}] {first.message}")
    assert connectome is not None
    return connectome


def scan_root(path) -> list[DatasetSummary]:
    """Summarize every dataset directory directly under ``path``.

    One summary per immediate subdirectory that contains a manifest.json,
    ordered lexicographically by directory name.  Broken datasets appear
    with ok=False; nothing raises on their behalf.
    """
    root = Path(path)
    if not root.is_dir():
        raise MissingFile(f"{root} is not a directory")
    summaries = []
    for sub in sorted(root.iterdir(), key=lambda p: p.name):
        if not sub.is_dir() or not (sub / "manifest.json").is_file():
            continue
        try:
            manifest = parse_manifest((sub / "manifest.json").read_bytes())
        except Exception:
            summaries.append(DatasetSummary(sub.name, sub, None, None, (), False))
            continue
        report = validate_dataset(sub)
        summaries.append(
            DatasetSummary(
                name=manifest.name,
                path=sub,
                num_nodes=manifest.num_nodes,
                num_frames=manifest.num_frames,
                layouts=manifest.layouts,
                ok=report.ok,
            )
        )
    return summaries


# --- writer -------------------------------------------------------------------


def format_real(x: float) -> str:
    """Shortest positional decimal that parses back to exactly ``x``."""
    return np.format_float_positional(np.float64(x), trim="0")


def manifest_to_json(manifest: Manifest) -> str:
    doc = {
        "name": manifest.name,
        "num_nodes": manifest.num_nodes,
        "num_frames": manifest.num_frames,
    }
    if manifest.frame_duration_seconds is not None:
        doc["frame_duration_seconds"] = manifest.frame_duration_seconds
    doc.update(
        default_layout=manifest.default_layout,
        layouts=list(manifest.layouts),
        signed=manifest.signed,
    )
    return json.dumps(doc, indent=2) + "\n"


def write_dataset(connectome: DynamicConnectome, path, overwrite: bool = False) -> Path:
    """Write a dataset directory in the standard format.

    Output is byte-deterministic: reals are written with format_real, rows
    in model order, LF line endings.  Refuses to clobber an existing
    dataset unless ``overwrite`` is set.
    """
    root = Path(path)
    if (root / "manifest.json").exists() and not overwrite:
        raise FileExistsError(f"{root} already contains a dataset")
    (root / "layouts").mkdir(parents=True, exist_ok=True)
    (root / "frames").mkdir(parents=True, exist_ok=True)

    def write(rel: str, text: str) -> None:
        with open(root / rel, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    write("manifest.json", manifest_to_json(connectome.manifest))

    lines = ["id,label,region,hemisphere"]
    for node in connectome.nodes:
        lines.append(f"{node.id},{node.label},{node.region},{HEMISPHERE_LETTERS[node.hemisphere]}")
    write("nodes.csv", "\n".join(lines) + "\n")

    for name in connectome.manifest.layouts:
        layout = connectome.layouts[name]
        lines = ["id,x,y,z"]
        for i, (x, y, z) in enumerate(layout.positions):
            lines.append(f"{i},{format_real(x)},{format_real(y)},{format_real(z)}")
        write(f"layouts/{name}.csv", "\n".join(lines) + "\n")

    t = connectome.num_frames
    lines = ["id," + ",".join(f"f{k}" for k in range(t))]
    for i in range(connectome.num_nodes):
        lines.append(f"{i}," + ",".join(str(m) for m in connectome.affiliations[i]))
    write("affiliations.csv", "\n".join(lines) + "\n")

    for frame in connectome.frames:
        lines = ["source,target,weight"]
        for s, u, w in frame:
            lines.append(f"{s},{u},{format_real(w)}")
        write(f"frames/{frame_filename(frame.frame_index)}", "\n".join(lines) + "\n")

    return root
