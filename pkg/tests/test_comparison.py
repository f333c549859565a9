"""Comparison tests: ARI oracle, alignment, relabeling, overlay assembly."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempocave.comparison import (
    align_nodes,
    build_overlay,
    overlay_to_dict,
    partition_agreement,
    relabel_modules,
)
from tempocave.errors import (
    EmptyAlignment,
    EmptyIntersection,
    LengthMismatch,
    TooFewNodes,
)

from conftest import make_connectome, usecase_pair


# --- naive pair-counting reference (literal enumeration over element pairs) ---


def naive_ari(a, b):
    n = len(a)
    together_both = together_a = together_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_a = a[i] == a[j]
            same_b = b[i] == b[j]
            together_a += same_a
            together_b += same_b
            together_both += same_a and same_b
    total = n * (n - 1) // 2
    expected = together_a * together_b / total
    maximum = (together_a + together_b) / 2
    if maximum == expected:
        return 1.0
    return (together_both - expected) / (maximum - expected)


def all_partitions(n):
    """All set partitions of range(n) as restricted-growth label strings."""
    def rec(prefix, used):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(used + 1):
            yield from rec(prefix + [v], max(used, v + 1))
    yield from rec([0], 1)


partition_strategy = st.lists(st.integers(0, 5), min_size=2, max_size=30)


# --- partition_agreement ------------------------------------------------------


def test_ari_label_invariant_identical_structure():
    assert partition_agreement([0, 0, 1, 1], [5, 5, 9, 9]) == 1.0


def test_ari_crossed_pairs_is_minus_half():
    assert partition_agreement([1, 1, 2, 2], [1, 2, 1, 2]) == -0.5


def test_ari_all_singletons_convention():
    assert partition_agreement([0, 1, 2, 3], [0, 1, 2, 3]) == 1.0


def test_ari_length_mismatch():
    with pytest.raises(LengthMismatch):
        partition_agreement([0, 1], [0, 1, 2])


def test_ari_too_few():
    with pytest.raises(TooFewNodes):
        partition_agreement([0], [0])


@given(partition_strategy, st.randoms())
def test_ari_symmetric_and_matches_naive(a, rng):
    b = [rng.randint(0, 5) for _ in a]
    ab = partition_agreement(a, b)
    assert ab == partition_agreement(b, a)
    assert ab == pytest.approx(naive_ari(a, b), abs=1e-12)


@given(partition_strategy, st.permutations(list(range(6))))
def test_ari_relabel_invariant(a, perm):
    b = [len(a) // (i + 1) % 3 for i in range(len(a))]
    assert partition_agreement(a, b) == pytest.approx(
        partition_agreement([perm[x] for x in a], b), abs=1e-12
    )


def test_ari_exhaustive_small():
    parts = list(all_partitions(4))
    assert len(parts) == 15  # Bell(4)
    for a in parts:
        for b in parts:
            assert partition_agreement(a, b) == pytest.approx(naive_ari(a, b), abs=1e-12)


# --- align_nodes -----------------------------------------------------------------


def test_align_identical_atlases():
    left = make_connectome([[0], [0], [0]])
    right = make_connectome([[1], [1], [1]])
    alignment = align_nodes(left, right)
    assert alignment.pairs == ((0, 0), (1, 1), (2, 2))
    assert alignment.unmatched_left == ()
    assert alignment.unmatched_right == ()


def test_align_permuted_labels():
    labels = ["a", "b", "c", "d"]
    left = make_connectome([[0]] * 4, labels=labels)
    right = make_connectome([[0]] * 4, labels=["d", "c", "a", "b"])
    alignment = align_nodes(left, right)
    assert alignment.pairs == ((0, 2), (1, 3), (2, 1), (3, 0))


def test_align_partial_overlap():
    left = make_connectome([[0]] * 3, labels=["a", "b", "x"])
    right = make_connectome([[0]] * 3, labels=["b", "a", "y"])
    alignment = align_nodes(left, right)
    assert alignment.pairs == ((0, 1), (1, 0))
    assert alignment.unmatched_left == ("x",)
    assert alignment.unmatched_right == ("y",)


def test_align_disjoint():
    left = make_connectome([[0]], labels=["a"])
    right = make_connectome([[0]], labels=["b"])
    with pytest.raises(EmptyIntersection):
        align_nodes(left, right)


# --- relabel_modules ----------------------------------------------------------------


def test_relabel_by_dominant_cooccurrence():
    # right 7 co-occurs with left 1 on 90% of node-frames, right 9 with left 2
    left = make_connectome([[1] * 10, [2] * 10])
    right = make_connectome([[7] * 9 + [9], [9] * 9 + [7]])
    alignment = align_nodes(left, right)
    relabel = relabel_modules(left.affiliations, right.affiliations, alignment)
    assert relabel.mapping == {7: 1, 9: 2}


def test_relabel_identity_for_identical_series():
    c = make_connectome([[0, 1, 0], [2, 2, 2], [1, 0, 1]])
    alignment = align_nodes(c, c)
    relabel = relabel_modules(c.affiliations, c.affiliations, alignment)
    assert relabel.mapping == {0: 0, 1: 1, 2: 2}


def test_relabel_extra_right_module_gets_fresh_id():
    left = make_connectome([[0] * 4, [1] * 4, [1] * 4])
    right = make_connectome([[0] * 4, [1] * 4, [5] * 4])
    alignment = align_nodes(left, right)
    relabel = relabel_modules(left.affiliations, right.affiliations, alignment)
    assert relabel.mapping[0] == 0
    assert relabel.mapping[1] == 1
    assert relabel.mapping[5] == 2  # max(left ids) + 1
    values = list(relabel.mapping.values())
    assert len(values) == len(set(values))  # injective


def test_relabel_empty_alignment():
    left = make_connectome([[0]])
    with pytest.raises(EmptyAlignment):
        relabel_modules(left.affiliations, left.affiliations,
                        type(align_nodes(left, left))((), (), ()))


@given(st.integers(0, 2**32 - 1))
def test_relabel_injective_and_deterministic(seed):
    rng = np.random.default_rng(seed)
    n, t = 5, 8
    left = make_connectome(rng.integers(0, 4, size=(n, t)))
    right = make_connectome(rng.integers(0, 5, size=(n, t)))
    alignment = align_nodes(left, right)
    m1 = relabel_modules(left.affiliations, right.affiliations, alignment).mapping
    m2 = relabel_modules(left.affiliations, right.affiliations, alignment).mapping
    assert m1 == m2
    assert len(set(m1.values())) == len(m1)
    assert set(m1) == set(np.unique(right.affiliations).tolist())


# --- build_overlay ---------------------------------------------------------------------


def test_self_overlay_perfect_agreement_zero_deltas():
    c = make_connectome([[0, 1, 2, 0], [1, 1, 2, 2], [0, 0, 0, 1]])
    overlay = build_overlay(c, c, relabel=True)
    assert np.all(overlay.agreement == 1.0)
    for d in overlay.deltas:
        assert d.flexibility_delta_raw == 0
        assert d.dwelling_delta_frames == 0
    # both halves show the same module at every frame
    assert np.array_equal(overlay.frame_modules[..., 0], overlay.frame_modules[..., 1])


def test_usecase_flexibility_delta_plus_two():
    pre, post = usecase_pair()
    overlay = build_overlay(pre, post, relabel=False)
    deltas = {d.label: d.flexibility_delta_raw for d in overlay.deltas}
    assert deltas["angular_R"] == 2
    assert deltas["supramarginal_R"] == 0


def test_overlay_uses_common_frame_prefix():
    left = make_connectome([[0] * 5, [1] * 5])
    right = make_connectome([[0] * 3, [1] * 3])
    overlay = build_overlay(left, right)
    assert overlay.num_frames == 3
    assert overlay.agreement.shape == (3,)
    assert overlay.frame_modules.shape == (3, 2, 2)


def test_overlay_agreement_in_range():
    rng = np.random.default_rng(11)
    left = make_connectome(rng.integers(0, 3, size=(6, 9)))
    right = make_connectome(rng.integers(0, 3, size=(6, 9)))
    overlay = build_overlay(left, right)
    assert np.all(overlay.agreement >= -1.0)
    assert np.all(overlay.agreement <= 1.0)


def test_overlay_export_shape():
    pre, post = usecase_pair()
    doc = overlay_to_dict(build_overlay(pre, post, relabel=True))
    assert set(doc) == {
        "alignment", "relabel_map", "relabel_applied", "num_frames",
        "agreement", "frame_modules", "node_deltas",
    }
    assert doc["alignment"]["pairs"] == [[0, 0], [1, 1], [2, 2]]
    assert len(doc["agreement"]) == 15
    assert doc["node_deltas"][0] == {
        "label": "angular_R",
        "flexibility_delta_raw": 2,
        "dwelling_delta_frames": post_minus_pre_dwelling(),
    }


def post_minus_pre_dwelling():
    # pre angular: {0: 8, 1: 7} -> 8; post angular: {1: 6, 2: 6, 0: 2, 3: 1} -> tie 1 -> 6
    return 6 - 8
