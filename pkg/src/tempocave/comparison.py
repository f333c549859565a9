"""Pairwise comparison of two dynamic connectomes.

Aligns the two node atlases by label, reconciles their (otherwise
incomparable) module-id spaces with a greedy best-overlap relabeling,
scores per-frame partition agreement with the adjusted Rand index, and
assembles the split-node overlay model: per matched node and frame, the
pair of module ids shown on the node's left and right halves, plus
per-node metric deltas (right minus left).

Frame alignment is index-wise over the common prefix: an overlay covers
min(T_left, T_right) frames with no temporal warping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyAlignment, EmptyIntersection, LengthMismatch, TooFewNodes
from .metrics import summarize
from .model import DynamicConnectome


@dataclass(frozen=True)
class NodeAlignment:
    """Label-matched node pairs plus the labels left unmatched on each side."""

    pairs: tuple[tuple[int, int], ...]  # (left id, right id), in left-id order
    unmatched_left: tuple[str, ...]
    unmatched_right: tuple[str, ...]


@dataclass(frozen=True)
class RelabelMap:
    """Injective map from right-connectome module ids into the left id space.

    Ids without a confident counterpart pass through to fresh ids above
    every left id, so relabeled right modules never collide with left ones.
    """

    mapping: dict[int, int]

    def apply(self, modules: np.ndarray) -> np.ndarray:
        out = np.asarray(modules).copy()
        for r, l in self.mapping.items():
            out[np.asarray(modules) == r] = l
        return out

    @staticmethod
    def identity(modules: Sequence[int]) -> "RelabelMap":
        return RelabelMap({int(m): int(m) for m in sorted(set(int(x) for x in modules))})


@dataclass(frozen=True)
class NodeDelta:
    label: str
    flexibility_delta_raw: int
    dwelling_delta_frames: int


@dataclass(frozen=True, eq=False)
class ComparisonOverlay:
    """Everything a split-node overlay view needs for one dataset pair."""

    alignment: NodeAlignment
    relabel_map: RelabelMap
    relabel_applied: bool
    num_frames: int
    frame_modules: np.ndarray  # (T, P, 2) int64: [left module, right module] per pair
    agreement: np.ndarray      # (T,) float64 adjusted Rand index per frame
    deltas: tuple[NodeDelta, ...]


def align_nodes(left: DynamicConnectome, right: DynamicConnectome) -> NodeAlignment:
    """Match nodes across two datasets by exact label equality.

    Atlases may be stored in different file orders, so matching is by
    label, not index.  Raises EmptyIntersection when no label is shared.
    """
    right_by_label = {node.label: node.id for node in right.nodes}
    pairs = []
    unmatched_left = []
    for node in left.nodes:
        if node.label in right_by_label:
            pairs.append((node.id, right_by_label[node.label]))
        else:
            unmatched_left.append(node.label)
    matched_right = {r for _, r in pairs}
    unmatched_right = [n.label for n in right.nodes if n.id not in matched_right]
    if not pairs:
        raise EmptyIntersection("the two datasets share no node labels")
    return NodeAlignment(tuple(pairs), tuple(unmatched_left), tuple(unmatched_right))


def partition_agreement(partition_a: Sequence[int], partition_b: Sequence[int]) -> float:
    """Adjusted Rand index between two partitions of the same elements.

    Uses the pair-counting contingency formula.  When the expected and
    maximum indices coincide (e.g. two identical partitions, including the
    all-singletons case) the value is defined as 1.0.
    """
    a = np.asarray(partition_a, dtype=np.int64).reshape(-1)
    b = np.asarray(partition_b, dtype=np.int64).reshape(-1)
    if a.size != b.size:
        raise LengthMismatch(f"partition sizes differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise TooFewNodes("partition agreement needs at least 2 elements")

    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    contingency = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(contingency, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) // 2

    sum_cells = int(np.sum(comb2(contingency)))
    sum_rows = int(np.sum(comb2(contingency.sum(axis=1))))
    sum_cols = int(np.sum(comb2(contingency.sum(axis=0))))
    total = int(comb2(n))

    # exact integer arithmetic with one final division, so structurally
    # identical partitions give exactly 1.0 and rationals like -1/2 are exact
    numerator = 2 * (sum_cells * total - sum_rows * sum_cols)
    denominator = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols
    if denominator == 0:
        return 1.0
    return numerator / denominator


def relabel_modules(
    left_affiliations: np.ndarray,
    right_affiliations: np.ndarray,
    alignment: NodeAlignment,
) -> RelabelMap:
    """Map right module ids onto left ones by greedy co-occurrence overlap.

    Builds the (right module, left module) confusion matrix over matched
    nodes and the shared frame prefix, then repeatedly maps the
    highest-count pair, removing both ids from play; ties break by
    (smaller right id, smaller left id).  Right ids that never co-occur
    get fresh ids above max(left ids), in ascending right-id order.
    """
    if not alignment.pairs:
        raise EmptyAlignment("cannot relabel with an empty alignment")
    left_aff = np.asarray(left_affiliations, dtype=np.int64)
    right_aff = np.asarray(right_affiliations, dtype=np.int64)
    shared = min(left_aff.shape[1], right_aff.shape[1])

    left_ids = np.array([l for l, _ in alignment.pairs])
    right_ids = np.array([r for _, r in alignment.pairs])
    lmods = left_aff[left_ids, :shared].ravel()
    rmods = right_aff[right_ids, :shared].ravel()

    counts: dict[tuple[int, int], int] = {}
    for r, l in zip(rmods.tolist(), lmods.tolist()):
        counts[(r, l)] = counts.get((r, l), 0) + 1

    candidates = sorted(counts.items(), key=lambda item: (-item[1], item[0][0], item[0][1]))
    mapping: dict[int, int] = {}
    used_left: set[int] = set()
    for (r, l), _ in candidates:
        if r in mapping or l in used_left:
            continue
        mapping[r] = l
        used_left.add(l)

    all_right = sorted(set(np.unique(right_aff).tolist()))
    fresh = int(np.max(left_aff)) + 1
    for r in all_right:
        if r not in mapping:
            mapping[r] = fresh
            fresh += 1
    return RelabelMap(mapping)


def build_overlay(
    left: DynamicConnectome,
    right: DynamicConnectome,
    relabel: bool = True,
) -> ComparisonOverlay:
    """Assemble the full comparison model for a dataset pair.

    Per-frame module pairs cover min(T_left, T_right) frames; agreement
    is the ARI over matched nodes at each shared frame; deltas are the
    right-minus-left differences of raw flexibility and dwelling frames,
    each computed on its own dataset's full series.
    """
    alignment = align_nodes(left, right)
    num_frames = min(left.num_frames, right.num_frames)

    if relabel:
        applied = relabel_modules(left.affiliations, right.affiliations, alignment)
    else:
        applied = RelabelMap.identity(np.unique(right.affiliations))

    left_ids = np.array([l for l, _ in alignment.pairs])
    right_ids = np.array([r for _, r in alignment.pairs])
    left_mods = left.affiliations[left_ids, :num_frames]
    right_mods = applied.apply(right.affiliations[right_ids, :num_frames])
    frame_modules = np.stack([left_mods.T, right_mods.T], axis=2)

    agreement = np.array(
        [
            partition_agreement(left.affiliations[left_ids, t], right.affiliations[right_ids, t])
            for t in range(num_frames)
        ]
    )

    left_summaries = {s.label: s for s in summarize(left)}
    right_summaries = {s.label: s for s in summarize(right)}
    deltas = []
    for left_id, _ in alignment.pairs:
        label = left.nodes[left_id].label
        ls, rs = left_summaries[label], right_summaries[label]
        deltas.append(
            NodeDelta(
                label=label,
                flexibility_delta_raw=rs.flexibility.raw - ls.flexibility.raw,
                dwelling_delta_frames=rs.dwelling.dwelling_frames - ls.dwelling.dwelling_frames,
            )
        )

    return ComparisonOverlay(
        alignment=alignment,
        relabel_map=applied,
        relabel_applied=relabel,
        num_frames=num_frames,
        frame_modules=frame_modules,
        agreement=agreement,
        deltas=tuple(deltas),
    )


def overlay_to_dict(overlay: ComparisonOverlay) -> dict:
    """JSON-ready export of an overlay (stable key order)."""
    return {
        "alignment": {
            "pairs": [[l, r] for l, r in overlay.alignment.pairs],
            "unmatched_left": list(overlay.alignment.unmatched_left),
            "unmatched_right": list(overlay.alignment.unmatched_right),
        },
        "relabel_map": {str(r): l for r, l in sorted(overlay.relabel_map.mapping.items())},
        "relabel_applied": overlay.relabel_applied,
        "num_frames": overlay.num_frames,
        "agreement": [float(x) for x in overlay.agreement],
        "frame_modules": overlay.frame_modules.tolist(),
        "node_deltas": [
            {
                "label": d.label,
                "flexibility_delta_raw": d.flexibility_delta_raw,
                "dwelling_delta_frames": d.dwelling_delta_frames,
            }
            for d in overlay.deltas
        ],
    }


def overlay_to_json(overlay: ComparisonOverlay) -> str:
    return json.dumps(overlay_to_dict(overlay), indent=2) + "\n"
