"""Deterministic 3D force-directed edge bundling.

Each edge starts as its straight chord and is repeatedly subdivided and
relaxed: over a fixed number of cycles the subdivision count doubles
while the iteration count shrinks by a third and the step halves, and
within each iteration
every interior polyline point feels (a) a spring force toward its two
polyline neighbors, scaled by stiffness times the current subdivision
count, and (b) a unit-magnitude attraction toward the corresponding
point of every compatible edge, weighted by the pairwise compatibility.
Compatibility is the product of angle, scale, and position terms
computed once between straight chords; pairs below the threshold never
interact.  Endpoints are pinned to the node positions bit-for-bit.

There is no randomness anywhere: identical inputs give identical
polylines.  The pair scan is O(E^2) and is processed in fixed-size
chunks so memory stays bounded at large edge counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSegment, InvalidParams, MissingPosition

_PAIR_CHUNK = 65536


@dataclass(frozen=True)
class BundleParams:
    """Relaxation schedule and force coefficients.

    step_size defaults to 0.04 times the layout bounding-box diagonal
    (layouts come in arbitrary units); pass an explicit value to pin it.
    """

    cycles: int = 6
    initial_subdivisions: int = 1
    iterations_first_cycle: int = 50
    step_size: Optional[float] = None
    stiffness: float = 0.1
    compatibility_threshold: float = 0.05

    def __post_init__(self):
        if not isinstance(self.cycles, int) or self.cycles < 1:
            raise InvalidParams("cycles must be an integer >= 1")
        if not isinstance(self.initial_subdivisions, int) or self.initial_subdivisions < 1:
            raise InvalidParams("initial_subdivisions must be an integer >= 1")
        if not isinstance(self.iterations_first_cycle, int) or self.iterations_first_cycle < 1:
            raise InvalidParams("iterations_first_cycle must be an integer >= 1")
        if self.step_size is not None and not self.step_size > 0:
            raise InvalidParams("step_size must be positive")
        if not self.stiffness > 0:
            raise InvalidParams("stiffness must be positive")
        if not 0.0 <= self.compatibility_threshold <= 1.0:
            raise InvalidParams("compatibility_threshold must be in [0, 1]")

    def iterations(self, cycle: int) -> int:
        """Iteration count for a zero-based cycle index (2/3 decay, floor, min 1)."""
        n = self.iterations_first_cycle
        for _ in range(cycle):
            n = max(1, (n * 2) // 3)
        return n

    def subdivisions(self, cycle: int) -> int:
        """Segment count for a zero-based cycle index (doubles each cycle)."""
        return self.initial_subdivisions * 2**cycle

    def cycle_step(self, base_step: float, cycle: int) -> float:
        """Per-cycle step: halves each cycle so the relaxation settles.

        The attraction term has unit magnitude regardless of distance, so a
        constant step would leave every interior point jittering with
        amplitude ~step; shrinking it each cycle bounds the terminal jitter
        by base_step / 2**(cycles-1) while early cycles still move freely.
        """
        return base_step / 2**cycle


@dataclass(frozen=True, eq=False)
class BundledEdge:
    source: int
    target: int
    polyline: np.ndarray  # (P, 3); first point == source position, last == target position


def edge_compatibility(e1, e2) -> float:
    """Compatibility in [0, 1] of two straight 3D segments.

    The product of three terms: angle |cos(theta)| between directions,
    a scale term penalizing length mismatch, and a position term
    penalizing midpoint separation relative to the mean length.
    Symmetric in its arguments; raises DegenerateSegment on zero length.
    """
    a = np.asarray(e1, dtype=np.float64)
    b = np.asarray(e2, dtype=np.float64)
    if a.shape != (2, 3) or b.shape != (2, 3):
        raise InvalidParams("segments must be (2, 3) point pairs")
    va, vb = a[1] - a[0], b[1] - b[0]
    la, lb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if la == 0.0 or lb == 0.0:
        raise DegenerateSegment("zero-length segment has no direction")
    angle = abs(float(np.dot(va, vb))) / (la * lb)
    angle = min(angle, 1.0)
    l_avg = (la + lb) / 2.0
    scale = 2.0 / (l_avg / min(la, lb) + max(la, lb) / l_avg)
    midpoint_gap = float(np.linalg.norm((a[0] + a[1]) / 2.0 - (b[0] + b[1]) / 2.0))
    position = l_avg / (l_avg + midpoint_gap)
    return angle * scale * position


def _compatibility_pairs(p0: np.ndarray, p1: np.ndarray, threshold: float):
    """All ordered pairs (i, j, C_ij, reverse_j) with C_ij >= threshold."""
    chords = p1 - p0
    lengths = np.linalg.norm(chords, axis=1)
    ok = lengths > 0  # coincident-endpoint chords attract nothing
    unit = np.zeros_like(chords)
    unit[ok] = chords[ok] / lengths[ok, None]

    angle = np.abs(unit @ unit.T)
    np.clip(angle, None, 1.0, out=angle)
    l_avg = (lengths[:, None] + lengths[None, :]) / 2.0
    l_min = np.minimum(lengths[:, None], lengths[None, :])
    l_max = np.maximum(lengths[:, None], lengths[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = 2.0 / (l_avg / l_min + l_max / l_avg)
    mid = (p0 + p1) / 2.0
    gap = np.linalg.norm(mid[:, None, :] - mid[None, :, :], axis=2)
    position = l_avg / (l_avg + gap)

    compat = angle * scale * position
    compat[~ok, :] = 0.0
    compat[:, ~ok] = 0.0
    np.fill_diagonal(compat, 0.0)

    i_idx, j_idx = np.nonzero(compat >= threshold)
    keep = i_idx != j_idx
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    coeff = compat[i_idx, j_idx]

    # align orientations: follow the other polyline backwards when its
    # endpoints pair up closer that way (ties keep forward order)
    fwd = np.linalg.norm(p0[i_idx] - p0[j_idx], axis=1) + np.linalg.norm(
        p1[i_idx] - p1[j_idx], axis=1
    )
    rev = np.linalg.norm(p0[i_idx] - p1[j_idx], axis=1) + np.linalg.norm(
        p1[i_idx] - p0[j_idx], axis=1
    )
    reverse = fwd > rev
    return i_idx, j_idx, coeff, reverse


def bundle_frame(
    positions,
    edges: Sequence[tuple[int, int]],
    params: Optional[BundleParams] = None,
) -> list[BundledEdge]:
    """Bundle one frame's edges into polylines over a 3D layout.

    ``positions`` is an (N, 3) array (or anything with a ``.positions``
    attribute, e.g. a Layout) indexed by node id; ``edges`` is the
    already-filtered sequence of (source, target) pairs to draw.  Output
    order matches input order and the whole computation is deterministic.
    """
    params = params or BundleParams()
    pos = np.asarray(getattr(positions, "positions", positions), dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise InvalidParams("positions must have shape (num_nodes, 3)")
    edge_list = [(int(s), int(t)) for s, t in edges]
    if not edge_list:
        return []
    for s, t in edge_list:
        if not (0 <= s < len(pos) and 0 <= t < len(pos)):
            raise MissingPosition(f"edge ({s},{t}) endpoint has no position")
    if not np.all(np.isfinite(pos)):
        raise MissingPosition("layout contains non-finite positions")

    src = np.array([s for s, _ in edge_list])
    dst = np.array([t for _, t in edge_list])
    p0, p1 = pos[src], pos[dst]

    if params.step_size is not None:
        step = params.step_size
    else:
        diagonal = float(np.linalg.norm(pos.max(axis=0) - pos.min(axis=0)))
        step = 0.04 * diagonal if diagonal > 0 else 1.0

    i_idx, j_idx, coeff, reverse = _compatibility_pairs(
        p0, p1, params.compatibility_threshold
    )

    pts: Optional[np.ndarray] = None  # (E, P, 3)
    for cycle in range(params.cycles):
        segments = params.subdivisions(cycle)
        if pts is None:
            fractions = np.linspace(0.0, 1.0, segments + 1)
            pts = p0[:, None, :] + fractions[None, :, None] * (p1 - p0)[:, None, :]
        else:
            old = pts
            pts = np.empty((old.shape[0], 2 * (old.shape[1] - 1) + 1, 3))
            pts[:, ::2] = old
            pts[:, 1::2] = (old[:, :-1] + old[:, 1:]) / 2.0
        pts[:, 0], pts[:, -1] = p0, p1  # pin exactly; lerp rounding must not leak in

        spring_k = params.stiffness * segments
        step_c = params.cycle_step(step, cycle)
        for _ in range(params.iterations(cycle)):
            force = np.zeros_like(pts)
            force[:, 1:-1] = spring_k * (
                pts[:, :-2] - pts[:, 1:-1] + pts[:, 2:] - pts[:, 1:-1]
            )
            for lo in range(0, len(i_idx), _PAIR_CHUNK):
                sel = slice(lo, lo + _PAIR_CHUNK)
                q = pts[j_idx[sel]]
                flip = reverse[sel]
                q[flip] = q[flip, ::-1]
                delta = q - pts[i_idx[sel]]
                dist = np.linalg.norm(delta, axis=2)
                with np.errstate(divide="ignore", invalid="ignore"):
                    pull = np.where(dist[..., None] > 0, delta / dist[..., None], 0.0)
                np.add.at(force, i_idx[sel], coeff[sel, None, None] * pull)
            force[:, 0] = 0.0
            force[:, -1] = 0.0
            pts = pts + step_c * force

    pts[:, 0], pts[:, -1] = p0, p1
    return [
        BundledEdge(source=s, target=t, polyline=pts[k])
        for k, (s, t) in enumerate(edge_list)
    ]


def bundles_to_dicts(bundles: Sequence[BundledEdge]) -> list[dict]:
    """JSON-ready export: [{source, target, points: [[x, y, z], ...]}, ...]."""
    return [
        {"source": b.source, "target": b.target, "points": b.polyline.tolist()}
        for b in bundles
    ]
