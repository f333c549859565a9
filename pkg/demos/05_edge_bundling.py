"""Edge bundling: curved polylines that declutter dense frames.

Straight chords between brain regions pile up into hairballs; the
bundler relaxes visually compatible edges toward each other so related
connections share curved corridors.  Everything is deterministic, and
endpoints never move, so toggling bundling in the viewer just swaps
geometry.  Saves a before/after figure when matplotlib is installed.

Run demos/01_generate_and_validate.py first.
"""

from pathlib import Path

import numpy as np

from tempocave import BundleParams, bundle_frame, classify_edges, load_dataset

DATA = Path(__file__).resolve().parent / "output" / "data"
OUT = Path(__file__).resolve().parent / "output"

connectome = load_dataset(DATA / "p01_post")
layout = connectome.default_layout()
edges = [
    (e.source, e.target)
    for e in classify_edges(connectome.frame(0), 0.45)
    if e.passes_filter
]
print(f"bundling {len(edges)} edges that pass the |w| >= 0.45 filter")

bundled = bundle_frame(layout, edges, BundleParams())
arc_straight = sum(
    float(np.linalg.norm(layout.positions[t] - layout.positions[s])) for s, t in edges
)
arc_bundled = sum(
    float(np.sum(np.linalg.norm(np.diff(b.polyline, axis=0), axis=1))) for b in bundled
)
print(f"total polyline length: straight {arc_straight:.2f} -> bundled {arc_bundled:.2f}")
print(f"each edge is a {bundled[0].polyline.shape[0]}-point polyline; "
      "endpoints equal the node positions exactly")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the figure")
else:
    fig, axes = plt.subplots(1, 2, figsize=(10, 5), sharex=True, sharey=True)
    for ax, title in zip(axes, ("straight", "bundled")):
        ax.scatter(*layout.positions[:, :2].T, s=12, color="k", zorder=3)
        ax.set_title(title)
        ax.set_aspect("equal")
    for s, t in edges:
        axes[0].plot(*np.vstack([layout.positions[s], layout.positions[t]])[:, :2].T,
                     lw=0.6, alpha=0.5)
    for b in bundled:
        axes[1].plot(*b.polyline[:, :2].T, lw=0.6, alpha=0.5)
    OUT.mkdir(parents=True, exist_ok=True)
    fig.savefig(OUT / "bundling.png", dpi=150, bbox_inches="tight")
    print(f"figure written to {OUT / 'bundling.png'}")
