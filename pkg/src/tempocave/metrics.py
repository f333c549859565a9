"""Per-node and per-frame modularity-dynamics and connectivity metrics.

Flexibility counts how often a node changes module affiliation across the
frame sequence; dwelling time measures how long a node stays associated
with its dominant (most-occupied) module, both as total occupancy and as
the longest consecutive run.  Edge-level helpers classify signed weights
and accumulate per-node strengths.

All functions here are pure: they never mutate their inputs and return
the same result for the same arguments, so per-node work can be farmed
out to any number of workers and reassembled in id order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import EmptySeries, FrameOutOfRange, NegativeThreshold, UnknownNode
from .model import DynamicConnectome, EdgeFrame


@dataclass(frozen=True)
class FlexibilityScore:
    """Affiliation-change count, raw and normalized by T-1 (0 when T=1)."""

    raw: int
    normalized: float


@dataclass(frozen=True)
class DwellingScore:
    """Occupancy of the dominant module plus the longest single-module run.

    ``dwelling_frames`` is the TOTAL number of frames spent in the dominant
    module; ``longest_run_frames`` is the longest consecutive run in ANY
    module (possibly a non-dominant one).  ``dwelling_seconds`` is present
    only when the dataset declares a frame duration.
    """

    dominant_module: int
    dwelling_frames: int
    longest_run_frames: int
    dwelling_seconds: Optional[float] = None


@dataclass(frozen=True)
class ClassifiedEdge:
    source: int
    target: int
    weight: float
    sign: str
    passes_filter: bool


class NodeStrengths(NamedTuple):
    positive: float
    negative: float
    degree: int


@dataclass(frozen=True)
class NodeSummary:
    node_id: int
    label: str
    flexibility: FlexibilityScore
    dwelling: DwellingScore


@dataclass(frozen=True)
class ModuleStats:
    frame_index: int
    occupancy: dict[int, int]  # module id -> node count; zero-occupancy modules omitted
    num_modules: int


def flexibility(series: Sequence[int]) -> FlexibilityScore:
    """Count affiliation changes along one node's module-id series.

    raw is the number of steps t in [1, T) with series[t] != series[t-1];
    normalized divides by T-1 (defined as 0.0 for a single-frame series).
    Returning to a previously held module counts as a change like any other.
    """
    arr = np.asarray(series, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        raise EmptySeries("affiliation series must be nonempty")
    if arr.size == 1:
        return FlexibilityScore(raw=0, normalized=0.0)
    raw = int(np.count_nonzero(np.diff(arr)))
    return FlexibilityScore(raw=raw, normalized=raw / (arr.size - 1))


def dwelling(series: Sequence[int], frame_duration: Optional[float] = None) -> DwellingScore:
    """Dominant-module occupancy and longest constant run of one series.

    The dominant module is the one occupied for the most frames, ties
    broken by smallest module id.  ``frame_duration`` (seconds per frame),
    when given, also yields dwelling_seconds = dwelling_frames * duration.
    """
    arr = np.asarray(series, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        raise EmptySeries("affiliation series must be nonempty")
    modules, counts = np.unique(arr, return_counts=True)
    best = int(np.argmax(counts))  # np.unique sorts ids, argmax takes the first max
    dominant = int(modules[best])
    dwelling_frames = int(counts[best])

    boundaries = np.flatnonzero(np.diff(arr) != 0)
    run_edges = np.concatenate(([-1], boundaries, [arr.size - 1]))
    longest_run = int(np.max(np.diff(run_edges)))

    seconds = None if frame_duration is None else dwelling_frames * frame_duration
    return DwellingScore(
        dominant_module=dominant,
        dwelling_frames=dwelling_frames,
        longest_run_frames=longest_run,
        dwelling_seconds=seconds,
    )


def classify_edges(frame: EdgeFrame, threshold: float) -> list[ClassifiedEdge]:
    """Attach sign and filter status to every edge of a frame, order preserved.

    sign is positive iff weight > 0 (zero weights cannot occur in valid
    datasets); passes_filter iff |weight| >= threshold.
    """
    if threshold < 0:
        raise NegativeThreshold(f"threshold must be >= 0, got {threshold}")
    out = []
    for s, t, w in frame:
        out.append(
            ClassifiedEdge(
                source=s,
                target=t,
                weight=w,
                sign="positive" if w > 0 else "negative",
                passes_filter=abs(w) >= threshold,
            )
        )
    return out


def node_strengths(frame: EdgeFrame, node: int, num_nodes: int) -> NodeStrengths:
    """Sum incident positive weight, incident |negative| weight, and degree."""
    if not 0 <= node < num_nodes:
        raise UnknownNode(f"node {node} outside [0, {num_nodes})")
    incident = (frame.sources == node) | (frame.targets == node)
    w = frame.weights[incident]
    return NodeStrengths(
        positive=float(np.sum(w[w > 0])),
        negative=float(np.sum(-w[w < 0])),
        degree=int(np.count_nonzero(incident)),
    )


def module_stats(affiliations: np.ndarray, frame: int) -> ModuleStats:
    """Occupancy count per module at one frame; counts sum to num_nodes."""
    aff = np.asarray(affiliations)
    num_frames = aff.shape[1]
    if not 0 <= frame < num_frames:
        raise FrameOutOfRange(f"frame {frame} outside [0, {num_frames})")
    modules, counts = np.unique(aff[:, frame], return_counts=True)
    occupancy = {int(m): int(c) for m, c in zip(modules, counts)}
    return ModuleStats(frame_index=frame, occupancy=occupancy, num_modules=len(occupancy))


def summarize(connectome: DynamicConnectome) -> list[NodeSummary]:
    """One NodeSummary per node in id order; pure function of the dataset."""
    duration = connectome.manifest.frame_duration_seconds
    out = []
    for node in connectome.nodes:
        series = connectome.affiliations[node.id]
        out.append(
            NodeSummary(
                node_id=node.id,
                label=node.label,
                flexibility=flexibility(series),
                dwelling=dwelling(series, duration),
            )
        )
    return out


METRICS_CSV_COLUMNS = (
    "id,label,flexibility_raw,flexibility_norm,dominant_module,"
    "dwelling_frames,longest_run_frames"
)


def metrics_csv(summaries: list[NodeSummary]) -> str:
    """Render node summaries as CSV with fixed 6-decimal formatting.

    The dwelling_seconds column is present exactly when the summaries carry
    seconds (i.e. the manifest declared frame_duration_seconds).
    """
    with_seconds = bool(summaries) and summaries[0].dwelling.dwelling_seconds is not None
    header = METRICS_CSV_COLUMNS + (",dwelling_seconds" if with_seconds else "")
    lines = [header]
    for s in summaries:
        row = (
            f"{s.node_id},{s.label},{s.flexibility.raw},{s.flexibility.normalized:.6f},"
            f"{s.dwelling.dominant_module},{s.dwelling.dwelling_frames},"
            f"{s.dwelling.longest_run_frames}"
        )
        if with_seconds:
            row += f",{s.dwelling.dwelling_seconds:.6f}"
        lines.append(row)
    return "\n".join(lines) + "\n"
