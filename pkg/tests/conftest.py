"""Shared fixtures: hand-written dataset directories and model builders."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from tempocave.model import DynamicConnectome, EdgeFrame, Layout, Manifest, NodeMeta

TINY_MANIFEST = (
    '{"name": "tiny", "num_nodes": 3, "num_frames": 2,'
    ' "frame_duration_seconds": 1.8, "default_layout": "anatomical",'
    ' "layouts": ["anatomical"], "signed": true}'
)

TINY_FILES = {
    "manifest.json": TINY_MANIFEST + "\n",
    "nodes.csv": (
        "id,label,region,hemisphere\n"
        "0,supramarginal_L,supramarginal,L\n"
        "1,angular_L,angular,L\n"
        "2,precuneus_M,precuneus,M\n"
    ),
    "layouts/anatomical.csv": (
        "id,x,y,z\n"
        "0,0.0,0.0,1.0\n"
        "1,1.0,0.0,0.0\n"
        "2,0.0,1.0,0.0\n"
    ),
    "affiliations.csv": (
        "id,f0,f1\n"
        "0,0,0\n"
        "1,0,1\n"
        "2,1,1\n"
    ),
    "frames/frame_0000.csv": (
        "source,target,weight\n"
        "0,1,0.5\n"
        "1,2,-0.2\n"
    ),
    "frames/frame_0001.csv": (
        "source,target,weight\n"
        "0,1,0.35\n"
        "0,2,0.1\n"
    ),
}


def write_files(root: Path, files: dict[str, str]) -> Path:
    for rel, content in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
    return root


@pytest.fixture
def tiny_dataset(tmp_path: Path) -> Path:
    """Well-formed 3-node, 2-frame dataset directory."""
    return write_files(tmp_path / "tiny", dict(TINY_FILES))


@pytest.fixture
def tiny_files() -> dict[str, str]:
    """Copy of the tiny dataset's file contents, for making broken variants."""
    return dict(TINY_FILES)


def make_connectome(
    affiliations,
    labels=None,
    frames=None,
    name="made",
    signed=True,
    frame_duration=None,
    positions=None,
) -> DynamicConnectome:
    """Build an in-memory dataset from an (N, T) affiliation array."""
    aff = np.asarray(affiliations, dtype=np.int64)
    n, t = aff.shape
    if labels is None:
        labels = [f"node_{i:03d}" for i in range(n)]
    nodes = tuple(
        NodeMeta(i, labels[i], "region", "left" if i % 2 == 0 else "right")
        for i in range(n)
    )
    if positions is None:
        positions = np.column_stack(
            [np.arange(n, dtype=float), np.zeros(n), np.zeros(n)]
        )
    if frames is None:
        frames = [EdgeFrame(k, [], [], []) for k in range(t)]
    manifest = Manifest(
        name=name,
        num_nodes=n,
        num_frames=t,
        default_layout="anatomical",
        layouts=("anatomical",),
        signed=signed,
        frame_duration_seconds=frame_duration,
    )
    return DynamicConnectome(
        manifest=manifest,
        nodes=nodes,
        layouts={"anatomical": Layout("anatomical", positions)},
        frames=tuple(frames),
        affiliations=aff,
    )


def usecase_pair():
    """Pre/post treatment pattern: one node switches once pre, three times post.

    Both datasets are 15 frames long; the varying node's post series changes
    module exactly at t=2, t=8, and t=14, the pre series only at t=8.
    """
    t = 15
    pre_angular = [0] * 8 + [1] * 7               # change at t=8 only
    post_angular = [0] * 2 + [1] * 6 + [2] * 6 + [3]  # changes at t=2, 8, 14
    assert len(pre_angular) == len(post_angular) == t
    stable_a = [0] * t
    stable_b = [1] * t
    labels = ["angular_R", "supramarginal_R", "precuneus_M"]
    pre = make_connectome([pre_angular, stable_a, stable_b], labels=labels, name="pre")
    post = make_connectome([post_angular, stable_a, stable_b], labels=labels, name="post")
    return pre, post
