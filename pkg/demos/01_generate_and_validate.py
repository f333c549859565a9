"""Generate a reproducible synthetic dataset pair and validate it.

No clinical recordings ship with this repository, so every demo starts
from the synthetic generator: planted modular structure, seeded Philox
randomness, and the standard on-disk layout (manifest.json, nodes.csv,
layouts/, affiliations.csv, frames/).  Running this script twice
produces byte-identical directories.

    python3 demos/01_generate_and_validate.py
"""

import shutil
from pathlib import Path

from tempocave import SynthParams, generate, scan_root, validate_dataset, write_dataset

OUT = Path(__file__).resolve().parent / "output" / "data"

# A "pre-treatment" scan: sluggish module dynamics (low switch probability),
# and a "post-treatment" scan of the same atlas with livelier dynamics.
PRE = SynthParams(num_nodes=40, num_frames=200, num_modules=4,
                  switch_probability=0.02, seed=101, name="p01_pre")
POST = SynthParams(num_nodes=40, num_frames=200, num_modules=4,
                   switch_probability=0.12, seed=202, name="p01_post")

if OUT.exists():
    shutil.rmtree(OUT)

for params in (PRE, POST):
    dataset_dir = OUT / params.name
    write_dataset(generate(params), dataset_dir)
    report = validate_dataset(dataset_dir)
    status = "ok" if report.ok else f"{len(report.errors)} error(s)"
    print(f"wrote {dataset_dir}  ->  validate: {status}")

print("\ncarousel view of the data folder:")
for summary in scan_root(OUT):
    print(f"  {summary.id:10s}  nodes={summary.num_nodes}  frames={summary.num_frames}"
          f"  layouts={list(summary.layouts)}  ok={summary.ok}")

print("\nnext: demos/02_flexibility_dwelling.py reads these back")
