"""Command-line entry point: the full pipeline without the viewer.

Subcommands: list, validate, metrics, compare, bundle, synth, serve.
Machine-readable output (JSON or CSV) goes to stdout or --out files;
diagnostics go to stderr.  Exit codes: 0 success, 1 validation failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bundling, comparison, dataset_io, metrics, synth
from .errors import TempocaveError
from .metrics import classify_edges


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_list(args) -> int:
    summaries = dataset_io.scan_root(args.root)
    doc = [
        {
            "id": s.id,
            "name": s.name,
            "path": str(s.path),
            "num_nodes": s.num_nodes,
            "num_frames": s.num_frames,
            "layouts": list(s.layouts),
            "ok": s.ok,
        }
        for s in summaries
    ]
    print(json.dumps(doc, indent=2))
    return 0


def cmd_validate(args) -> int:
    report = dataset_io.validate_dataset(args.dataset)
    doc = {
        "path": str(report.path),
        "ok": report.ok,
        "findings": [
            {
                "severity": f.severity,
                "code": f.code,
                "message": f.message,
                "location": f.location,
            }
            for f in report.findings
        ],
    }
    print(json.dumps(doc, indent=2))
    if not report.ok:
        print(f"{len(report.errors)} error(s) in {report.path}", file=sys.stderr)
        return 1
    return 0


def cmd_metrics(args) -> int:
    connectome = dataset_io.load_dataset(args.dataset)
    if args.seconds and connectome.manifest.frame_duration_seconds is None:
        print("--seconds requested but the manifest has no frame_duration_seconds",
              file=sys.stderr)
        return 1
    summaries = metrics.summarize(connectome)
    _write_or_print(metrics.metrics_csv(summaries), args.out)
    return 0


def cmd_compare(args) -> int:
    left = dataset_io.load_dataset(args.left)
    right = dataset_io.load_dataset(args.right)
    overlay = comparison.build_overlay(left, right, relabel=args.relabel)
    _write_or_print(comparison.overlay_to_json(overlay), args.out)
    return 0


def cmd_bundle(args) -> int:
    connectome = dataset_io.load_dataset(args.dataset)
    if not 0 <= args.frame < connectome.num_frames:
        print(f"frame {args.frame} outside [0, {connectome.num_frames})", file=sys.stderr)
        return 1
    pairs = [
        (e.source, e.target)
        for e in classify_edges(connectome.frame(args.frame), args.min_abs_weight)
        if e.passes_filter
    ]
    bundles = bundling.bundle_frame(connectome.default_layout(), pairs)
    _write_or_print(json.dumps(bundling.bundles_to_dicts(bundles), indent=2) + "\n", args.out)
    return 0


def cmd_synth(args) -> int:
    params = synth.SynthParams(
        num_nodes=args.nodes,
        num_frames=args.frames,
        num_modules=args.modules,
        switch_probability=args.switch_prob,
        edge_density=args.density,
        seed=args.seed,
        name=args.name,
    )
    connectome = synth.generate(params)
    dataset_io.write_dataset(connectome, args.out)
    print(json.dumps({"path": str(Path(args.out)), "num_nodes": args.nodes,
                      "num_frames": args.frames, "seed": args.seed}))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.root, port=args.port, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempocave",
        description="dynamic connectome workbench: validate, analyze, compare, serve",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="summarize every dataset under a root folder")
    p.add_argument("root")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("validate", help="check one dataset and report every finding")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="export per-node flexibility/dwelling CSV")
    p.add_argument("dataset")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.add_argument("--seconds", action="store_true",
                   help="require the dwelling_seconds column (fails when the "
                        "manifest has no frame_duration_seconds)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="build the two-dataset overlay export")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p.add_argument("--relabel", action="store_true",
                   help="map right module ids onto left ones by best overlap")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bundle", help="export bundled edge polylines for one frame")
    p.add_argument("dataset")
    p.add_argument("--frame", type=int, required=True)
    p.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p.add_argument("--min-abs-weight", type=float, default=0.0)
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("synth", help="generate a reproducible synthetic dataset")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--modules", type=int, required=True)
    p.add_argument("--switch-prob", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--name", default="synthetic", help="dataset name in the manifest")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="serve datasets and the playback session over HTTP")
    p.add_argument("root")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TempocaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
