"""In-memory model of a dynamic connectome dataset.

A dataset couples a node atlas with one signed edge set per frame, a
per-node module-affiliation series, and one or more named 3D layouts.
Affiliations are stored as a single ``(num_nodes, num_frames)`` integer
array; edges are stored per frame as parallel ``sources/targets/weights``
arrays in canonical ``source < target`` form.

Instances are immutable once constructed: all arrays are marked
read-only, and the dataclasses are frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .errors import InvariantViolation

HEMISPHERES = ("left", "right", "midline")

#: on-disk one-letter codes <-> full hemisphere names
HEMISPHERE_CODES = {"L": "left", "R": "right", "M": "midline"}
HEMISPHERE_LETTERS = {v: k for k, v in HEMISPHERE_CODES.items()}


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Manifest:
    """Dataset-level description stored in ``manifest.json``."""

    name: str
    num_nodes: int
    num_frames: int
    default_layout: str
    layouts: tuple[str, ...]
    signed: bool
    frame_duration_seconds: Optional[float] = None

    def __post_init__(self):
        if self.num_nodes < 1:
            raise InvariantViolation("num_nodes must be >= 1")
        if self.num_frames < 1:
            raise InvariantViolation("num_frames must be >= 1")
        if self.frame_duration_seconds is not None and not self.frame_duration_seconds > 0:
            raise InvariantViolation("frame_duration_seconds must be positive")
        if not self.layouts:
            raise InvariantViolation("layouts must be nonempty")
        if len(set(self.layouts)) != len(self.layouts):
            raise InvariantViolation("layouts must be duplicate-free")
        if self.default_layout not in self.layouts:
            raise InvariantViolation(
                f"default_layout {self.default_layout!r} is not among layouts"
            )


@dataclass(frozen=True)
class NodeMeta:
    """Atlas entry for one brain region."""

    id: int
    label: str
    region: str
    hemisphere: str

    def __post_init__(self):
        if self.hemisphere not in HEMISPHERES:
            raise InvariantViolation(
                f"hemisphere must be one of {HEMISPHERES}, got {self.hemisphere!r}"
            )


@dataclass(frozen=True, eq=False)
class Layout:
    """Named 3D node placement; ``positions[id]`` is the (x, y, z) of a node."""

    name: str
    positions: np.ndarray  # (num_nodes, 3) float64

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvariantViolation("positions must have shape (num_nodes, 3)")
        if not np.all(np.isfinite(pos)):
            raise InvariantViolation("layout coordinates must be finite")
        object.__setattr__(self, "positions", _freeze(pos))


@dataclass(frozen=True, eq=False)
class EdgeFrame:
    """Signed weighted edge set of one frame, in canonical source < target form."""

    frame_index: int
    sources: np.ndarray  # (E,) int64
    targets: np.ndarray  # (E,) int64
    weights: np.ndarray  # (E,) float64

    def __post_init__(self):
        s = np.asarray(self.sources, dtype=np.int64).reshape(-1)
        t = np.asarray(self.targets, dtype=np.int64).reshape(-1)
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if not (len(s) == len(t) == len(w)):
            raise InvariantViolation("sources, targets, weights must have equal length")
        object.__setattr__(self, "sources", _freeze(s))
        object.__setattr__(self, "targets", _freeze(t))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def num_edges(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        for s, t, w in zip(self.sources, self.targets, self.weights):
            yield int(s), int(t), float(w)


@dataclass(frozen=True, eq=False)
class DynamicConnectome:
    """A fully cross-validated dataset; safe to share between threads."""

    manifest: Manifest
    nodes: tuple[NodeMeta, ...]
    layouts: dict[str, Layout]
    frames: tuple[EdgeFrame, ...]
    affiliations: np.ndarray  # (num_nodes, num_frames) int64

    def __post_init__(self):
        aff = np.asarray(self.affiliations, dtype=np.int64)
        object.__setattr__(self, "affiliations", _freeze(aff))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def num_nodes(self) -> int:
        return self.manifest.num_nodes

    @property
    def num_frames(self) -> int:
        return self.manifest.num_frames

    @property
    def labels(self) -> list[str]:
        return [n.label for n in self.nodes]

    def frame(self, t: int) -> EdgeFrame:
        return self.frames[t]

    def default_layout(self) -> Layout:
        return self.layouts[self.manifest.default_layout]


@dataclass(frozen=True)
class Finding:
    """One validation finding; ``severity`` is ``"error"`` or ``"warning"``."""

    severity: str
    code: str
    message: str
    location: str  # "file" or "file:line"


@dataclass
class ValidationReport:
    """Everything validate_dataset found; ``ok`` iff no error-severity finding."""

    path: Path
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]


@dataclass(frozen=True)
class DatasetSummary:
    """Carousel entry for one dataset directory under a scan root."""

    name: str
    path: Path
    num_nodes: Optional[int]
    num_frames: Optional[int]
    layouts: tuple[str, ...]
    ok: bool

    @property
    def id(self) -> str:
        """Directory name; unique within a scan root and used as the API id."""
        return self.path.name
