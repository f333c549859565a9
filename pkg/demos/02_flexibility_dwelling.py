"""Per-node summary statistics: flexibility and dwelling time.

Flexibility counts how often a region changes module affiliation over
the scan; dwelling time is how long it stays associated with its
dominant module (total frames, plus the longest uninterrupted run).
A region that rarely switches and dwells long is "sticky" — and a
comparatively sticky connectome can be the clinically interesting one.

Run demos/01_generate_and_validate.py first.
"""

from pathlib import Path

from tempocave import dwelling, flexibility, load_dataset, summarize
from tempocave.metrics import metrics_csv

DATA = Path(__file__).resolve().parent / "output" / "data"

# --- 1. the metric on a single hand-written series ---------------------------

series = [0] * 2 + [1] * 6 + [2] * 6 + [3]  # switches at t=2, t=8, t=14
flex = flexibility(series)
dwell = dwelling(series, frame_duration=1.8)
print(f"series of {len(series)} frames, switches at t=2, 8, 14")
print(f"  flexibility: raw={flex.raw}  normalized={flex.normalized:.3f}")
print(f"  dwelling: dominant module={dwell.dominant_module}, "
      f"{dwell.dwelling_frames} frames ({dwell.dwelling_seconds:.1f} s), "
      f"longest run {dwell.longest_run_frames}")

# --- 2. whole-dataset summaries, computed on load -----------------------------

for name in ("p01_pre", "p01_post"):
    connectome = load_dataset(DATA / name)
    rows = summarize(connectome)
    mean_norm = sum(r.flexibility.normalized for r in rows) / len(rows)
    top = max(rows, key=lambda r: r.flexibility.raw)
    print(f"\n{name}: mean normalized flexibility {mean_norm:.3f}")
    print(f"  most flexible region: {top.label} "
          f"(raw {top.flexibility.raw}, dwells {top.dwelling.dwelling_frames} frames)")

# --- 3. the CSV export used by the command line -------------------------------

csv_path = Path(__file__).resolve().parent / "output" / "p01_post_metrics.csv"
csv_path.parent.mkdir(parents=True, exist_ok=True)
csv_path.write_text(metrics_csv(summarize(load_dataset(DATA / "p01_post"))))
print(f"\nfull table written to {csv_path}")
print("(same thing via the CLI: tempocave metrics DATASET --out FILE)")
