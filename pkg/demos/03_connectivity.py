"""Signed connectivity: positive/negative classification and strengths.

Edge weights are signed correlations: positive when two regions are
correlated, negative when they are anticorrelated.  The viewer filters
edges by |weight| and can color them by sign; these are the operations
behind that.

Run demos/01_generate_and_validate.py first.
"""

from pathlib import Path

from tempocave import classify_edges, load_dataset, node_strengths
from tempocave.metrics import module_stats

DATA = Path(__file__).resolve().parent / "output" / "data"

connectome = load_dataset(DATA / "p01_post")
frame = connectome.frame(0)
print(f"frame 0 has {frame.num_edges} edges")

for threshold in (0.0, 0.3, 0.6):
    classified = classify_edges(frame, threshold)
    passing = [e for e in classified if e.passes_filter]
    positive = sum(1 for e in passing if e.sign == "positive")
    print(f"  |w| >= {threshold:.1f}: {len(passing):4d} pass "
          f"({positive} positive, {len(passing) - positive} negative)")

print("\nper-node strengths at frame 0 (first five nodes):")
for node in connectome.nodes[:5]:
    strengths = node_strengths(frame, node.id, connectome.num_nodes)
    print(f"  {node.label:16s} +{strengths.positive:6.2f}  -{strengths.negative:6.2f}"
          f"  degree {strengths.degree}")

stats = module_stats(connectome.affiliations, 0)
print(f"\nmodule occupancy at frame 0: {stats.occupancy} "
      f"({stats.num_modules} modules present)")
