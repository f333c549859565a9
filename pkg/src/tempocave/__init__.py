"""tempocave: a workbench for dynamic (time-series) connectome networks.

Load and validate dynamic-connectome dataset directories, compute
modularity-dynamics metrics (flexibility, dwelling time), classify
signed connectivity, compare two connectomes through a split-node
overlay with per-frame partition agreement, bundle edges for legibility,
generate reproducible synthetic datasets, and serve everything (plus a
synchronized playback session) to browser viewers over HTTP/WebSocket.

>>> import tempocave as tc
>>> data = tc.generate(tc.SynthParams(num_nodes=12, num_frames=30, seed=7))
>>> tc.summarize(data)[0].flexibility.raw  # doctest: +SKIP
"""

__version__ = "0.1.0"

from .bundling import BundledEdge, BundleParams, bundle_frame, edge_compatibility
from .comparison import (
    ComparisonOverlay,
    NodeAlignment,
    RelabelMap,
    align_nodes,
    build_overlay,
    partition_agreement,
    relabel_modules,
)
from .dataset_io import (
    load_dataset,
    parse_manifest,
    scan_root,
    validate_dataset,
    write_dataset,
)
from .metrics import (
    ClassifiedEdge,
    DwellingScore,
    FlexibilityScore,
    NodeSummary,
    classify_edges,
    dwelling,
    flexibility,
    module_stats,
    node_strengths,
    summarize,
)
from .model import (
    DatasetSummary,
    DynamicConnectome,
    EdgeFrame,
    Layout,
    Manifest,
    NodeMeta,
    ValidationReport,
)
from .playback import PlaybackCommand, PlaybackState, session_apply, session_tick
from .synth import SynthParams, generate

__all__ = [
    "BundleParams",
    "BundledEdge",
    "ClassifiedEdge",
    "ComparisonOverlay",
    "DatasetSummary",
    "DwellingScore",
    "DynamicConnectome",
    "EdgeFrame",
    "FlexibilityScore",
    "Layout",
    "Manifest",
    "NodeAlignment",
    "NodeMeta",
    "NodeSummary",
    "PlaybackCommand",
    "PlaybackState",
    "RelabelMap",
    "SynthParams",
    "ValidationReport",
    "align_nodes",
    "build_overlay",
    "bundle_frame",
    "classify_edges",
    "dwelling",
    "edge_compatibility",
    "flexibility",
    "generate",
    "load_dataset",
    "module_stats",
    "node_strengths",
    "parse_manifest",
    "partition_agreement",
    "relabel_modules",
    "scan_root",
    "session_apply",
    "session_tick",
    "summarize",
    "validate_dataset",
    "write_dataset",
]
