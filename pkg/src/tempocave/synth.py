"""Synthetic dynamic connectomes with planted modular structure.

Substitutes for clinical recordings in tests, demos, and statistical
checks.  Affiliations follow a memoryless switch model: every node starts
in a uniformly random module and at each step resamples its module
uniformly from all K with probability p, so the per-step probability of
actually changing module is exactly p*(K-1)/K — a closed-form oracle for
the flexibility metric.  Edges appear independently per frame with the
given density; weights are normal around a within-module or cross-module
mean depending on whether the endpoints currently share a module.

Randomness comes from NumPy's Philox generator (the counter-based
Philox-4x64-10 algorithm) keyed by the 64-bit seed through SeedSequence,
with a fixed draw order, so a seed reproduces the identical dataset on
any platform.  Weights and coordinates are rounded to 6 decimals at
generation time, which makes the in-memory model equal to its on-disk
round trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParams
from .model import DynamicConnectome, EdgeFrame, Layout, Manifest, NodeMeta

_REGIONS = ("frontal", "parietal", "temporal", "occipital", "cingulate", "insular")


@dataclass(frozen=True)
class SynthParams:
    num_nodes: int = 64
    num_frames: int = 200
    num_modules: int = 4
    switch_probability: float = 0.1
    within_weight_mean: float = 0.6
    cross_weight_mean: float = -0.2
    weight_noise_sd: float = 0.15
    edge_density: float = 0.1
    seed: int = 0
    name: str = "synthetic"
    frame_duration_seconds: Optional[float] = 1.8

    def __post_init__(self):
        if self.num_nodes < 1:
            raise InvalidParams("num_nodes must be >= 1")
        if self.num_frames < 1:
            raise InvalidParams("num_frames must be >= 1")
        if self.num_modules < 1:
            raise InvalidParams("num_modules must be >= 1")
        if not 0.0 <= self.switch_probability <= 1.0:
            raise InvalidParams("switch_probability must be in [0, 1]")
        if not 0.0 < self.edge_density <= 1.0:
            raise InvalidParams("edge_density must be in (0, 1]")
        if self.weight_noise_sd < 0:
            raise InvalidParams("weight_noise_sd must be >= 0")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must be a 64-bit unsigned integer")
        if self.weight_noise_sd == 0:
            degenerate_within = round(self.within_weight_mean, 6) == 0
            degenerate_cross = self.num_modules > 1 and round(self.cross_weight_mean, 6) == 0
            if degenerate_within or degenerate_cross:
                raise InvalidParams("zero weight_noise_sd with a mean that rounds to 0")


def sphere_layout(num_nodes: int) -> np.ndarray:
    """Deterministic spiral placement on the unit sphere (golden-angle)."""
    i = np.arange(num_nodes, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / num_nodes
    radius = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    angle = np.pi * (3.0 - np.sqrt(5.0)) * i
    xyz = np.column_stack([radius * np.cos(angle), radius * np.sin(angle), z])
    return np.round(xyz, 6)


def generate(params: SynthParams) -> DynamicConnectome:
    """Generate a dataset that always passes validation, reproducibly."""
    n, t, k = params.num_nodes, params.num_frames, params.num_modules
    rng = np.random.Generator(np.random.Philox(params.seed))

    affiliations = np.empty((n, t), dtype=np.int64)
    affiliations[:, 0] = rng.integers(0, k, size=n)
    for frame in range(1, t):
        resample = rng.random(n) < params.switch_probability
        fresh = rng.integers(0, k, size=n)
        affiliations[:, frame] = np.where(resample, fresh, affiliations[:, frame - 1])

    iu, ju = np.triu_indices(n, k=1)
    frames = []
    for frame in range(t):
        if len(iu):
            present = rng.random(len(iu)) < params.edge_density
        else:
            present = np.zeros(0, dtype=bool)
        src, dst = iu[present], ju[present]
        same = affiliations[src, frame] == affiliations[dst, frame]
        means = np.where(same, params.within_weight_mean, params.cross_weight_mean)
        weights = np.round(rng.normal(means, params.weight_noise_sd), 6)
        while True:
            zeros = np.flatnonzero(weights == 0.0)
            if not len(zeros):
                break
            weights[zeros] = np.round(
                rng.normal(means[zeros], params.weight_noise_sd), 6
            )
        frames.append(EdgeFrame(frame, src.astype(np.int64), dst.astype(np.int64), weights))

    width = max(3, len(str(n - 1)))
    nodes = tuple(
        NodeMeta(
            id=i,
            label=f"{_REGIONS[i % len(_REGIONS)]}_{i:0{width}d}",
            region=_REGIONS[i % len(_REGIONS)],
            hemisphere="left" if i % 2 == 0 else "right",
        )
        for i in range(n)
    )

    manifest = Manifest(
        name=params.name,
        num_nodes=n,
        num_frames=t,
        default_layout="anatomical",
        layouts=("anatomical",),
        signed=True,
        frame_duration_seconds=params.frame_duration_seconds,
    )
    return DynamicConnectome(
        manifest=manifest,
        nodes=nodes,
        layouts={"anatomical": Layout("anatomical", sphere_layout(n))},
        frames=tuple(frames),
        affiliations=affiliations,
    )
