import json
import random

import numpy as np
import pytest

from schakit import (
    Part,
    SchaError,
    all_prolongations,
    build_cluster_matrix,
    cluster_stack,
    compose,
    export_kirlin_text,
    parse_analysis,
    prolongations_at_level,
)
from schakit.reduction import cluster_assignment, initial_layer

from conftest import random_valid_analysis
from oracle import oracle_matrix

KEY = {"tonic": "C", "mode": "major"}


def build(voices: dict):
    return parse_analysis(json.dumps({"key": KEY, "voices": voices}))


def labels(refs):
    return [f"{p.value}:{i}" for p, i in refs]


# ---------------------------------------------------------------------------
# Fixture A: full hand-traced stack
# ---------------------------------------------------------------------------


def test_fixture_a_layer_shapes(fixture_a):
    stack = cluster_stack(fixture_a)
    assert [(m.rows, m.cols) for m in stack.layers] == [(5, 4), (4, 3), (3, 2)]
    assert stack.n0 == 5


def test_fixture_a_layer_0(fixture_a):
    # depths 3,1,0,2,3: note 2 clusters into its left neighbour, note 1
    m = cluster_stack(fixture_a).layers[0]
    assert labels(m.row_labels) == ["sop:0", "sop:1", "sop:2", "sop:3", "sop:4"]
    assert labels(m.col_labels) == ["sop:0", "sop:1", "sop:3", "sop:4"]
    expected = np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ],
        dtype=float,
    )
    assert np.array_equal(m.data, expected)


def test_fixture_a_layer_1(fixture_a):
    # depths now 2,0,1,2: note 1 joins note 0 on its left
    m = cluster_stack(fixture_a).layers[1]
    assert labels(m.row_labels) == ["sop:0", "sop:1", "sop:3", "sop:4"]
    assert labels(m.col_labels) == ["sop:0", "sop:3", "sop:4"]
    expected = np.array(
        [
            [1, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ],
        dtype=float,
    )
    assert np.array_equal(m.data, expected)


def test_fixture_a_layer_2(fixture_a):
    # depths now 1,0,1: note 3 joins note 0
    m = cluster_stack(fixture_a).layers[2]
    assert labels(m.row_labels) == ["sop:0", "sop:3", "sop:4"]
    assert labels(m.col_labels) == ["sop:0", "sop:4"]
    expected = np.array(
        [
            [1, 0],
            [1, 0],
            [0, 1],
        ],
        dtype=float,
    )
    assert np.array_equal(m.data, expected)


def test_fixture_a_composed_matrix(fixture_a):
    stack = cluster_stack(fixture_a)
    expected = np.array([[1, 0], [1, 0], [1, 0], [1, 0], [0, 1]], dtype=float)
    assert np.array_equal(compose(stack, 0, 3), expected)


# ---------------------------------------------------------------------------
# cluster_assignment branches
# ---------------------------------------------------------------------------


def test_branch_1_left_survivor(fixture_a):
    state = initial_layer(fixture_a)
    assert cluster_assignment(Part.SOP, 2, state) == (((Part.SOP, 1), 1.0),)


def test_branch_2_right_survivor():
    a = build({"sop": {"pitches": ["C5", "D5"], "depths": [0, 2]}})
    state = initial_layer(a)
    assert cluster_assignment(Part.SOP, 0, state) == (((Part.SOP, 1), 1.0),)


def test_branch_3_split(fixture_b):
    state = initial_layer(fixture_b)
    got = dict(cluster_assignment(Part.ALTO, 0, state))
    assert got == {(Part.SOP, 0): 0.5, (Part.BASS, 0): 0.5}


def test_branch_3_prefers_straddling_pair():
    # survivors on both sides at distance 1 each way; the constraint keeps
    # only the straddling pairs and the tie-break takes the smaller indices
    a = build(
        {
            "sop": {"pitches": ["C5", "R", "E5"], "depths": [1, None, 1]},
            "alto": {"pitches": ["R", "A3", "R"], "depths": [None, 0, None]},
            "bass": {"pitches": ["C3", "R", "G2"], "depths": [1, None, 1]},
        }
    )
    got = dict(cluster_assignment(Part.ALTO, 1, initial_layer(a)))
    assert got == {(Part.SOP, 0): 0.5, (Part.BASS, 2): 0.5}


def test_branch_3_relaxes_when_no_straddling_pair():
    # all outer survivors sit to the right of the inner note; the strict
    # opposite-sides constraint admits no pair, so the nearest pair wins
    a = build(
        {
            "sop": {"pitches": ["R", "D5"], "depths": [None, 1]},
            "alto": {"pitches": ["A3", "R"], "depths": [0, None]},
            "bass": {"pitches": ["R", "G2"], "depths": [None, 1]},
        }
    )
    got = dict(cluster_assignment(Part.ALTO, 0, initial_layer(a)))
    assert got == {(Part.SOP, 1): 0.5, (Part.BASS, 1): 0.5}


def test_inner_voice_with_own_survivors_stays_in_voice():
    a = build(
        {
            "alto": {"pitches": ["A3", "B3"], "depths": [0, 1]},
            "sop": {"pitches": ["C5", "D5"], "depths": [1, 1]},
            "bass": {"pitches": ["C3", "G2"], "depths": [1, 1]},
        }
    )
    assert cluster_assignment(Part.ALTO, 0, initial_layer(a)) == (((Part.ALTO, 1), 1.0),)


def test_strict_outer_without_survivor_raises():
    a = build(
        {
            "sop": {"pitches": ["C5", "D5"], "depths": [0, 0]},
            "bass": {"pitches": ["C3", "G2"], "depths": [2, 2]},
        }
    )
    with pytest.raises(SchaError) as exc:
        cluster_assignment(Part.SOP, 0, initial_layer(a))
    assert exc.value.code == "E_INFEASIBLE"


def test_lenient_outer_fallback_prefers_nearest_then_left():
    a = build(
        {
            "sop": {"pitches": ["C5", "D5"], "depths": [0, 0]},
            "bass": {"pitches": ["C3", "G2"], "depths": [2, 2]},
        }
    )
    state = initial_layer(a)
    assert cluster_assignment(Part.SOP, 0, state, lenient=True) == (((Part.BASS, 0), 1.0),)
    assert cluster_assignment(Part.SOP, 1, state, lenient=True) == (((Part.BASS, 1), 1.0),)
    stack = cluster_stack(a, lenient=True)
    assert [(m.rows, m.cols) for m in stack.layers] == [(4, 2), (2, 2)]

    b = build(
        {
            "sop": {"pitches": ["R", "C5", "R"], "depths": [None, 0, None]},
            "bass": {"pitches": ["C3", "R", "G2"], "depths": [1, None, 1]},
        }
    )
    # equidistant fallback targets: the earlier slot wins
    assert cluster_assignment(Part.SOP, 1, initial_layer(b), lenient=True) == (((Part.BASS, 0), 1.0),)


# ---------------------------------------------------------------------------
# Stack mechanics
# ---------------------------------------------------------------------------


def test_fixture_b_layer_0(fixture_b):
    m = cluster_stack(fixture_b).layers[0]
    assert labels(m.row_labels) == ["sop:0", "alto:0", "bass:0", "sop:1", "bass:1", "sop:2", "bass:2"]
    assert labels(m.col_labels) == ["sop:0", "bass:0", "sop:1", "sop:2", "bass:2"]
    expected = np.array(
        [
            [1, 0, 0, 0, 0],
            [0.5, 0.5, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ]
    )
    assert np.array_equal(m.data, expected)
    assert [(m.rows, m.cols) for m in cluster_stack(fixture_b).layers] == [(7, 5), (5, 4)]


def test_identity_layer_for_depth_gap():
    # depths 0 and 3: layers 1 and 2 cluster nothing
    a = build({"sop": {"pitches": ["C5", "D5"], "depths": [3, 0]}})
    stack = cluster_stack(a)
    assert [(m.rows, m.cols) for m in stack.layers] == [(2, 1), (1, 1), (1, 1)]
    assert np.array_equal(stack.layers[1].data, np.eye(1))
    assert np.array_equal(stack.layers[2].data, np.eye(1))


def test_all_rest_analysis_has_empty_stack():
    a = build({"sop": {"pitches": ["R", "R"]}})
    stack = cluster_stack(a)
    assert stack.layers == ()
    assert stack.n0 == 0


def test_layer_count_equals_max_depth():
    rng = random.Random(7001)
    for _ in range(100):
        a = random_valid_analysis(rng, max_nv=10)
        assert len(cluster_stack(a).layers) == a.max_depth


def test_row_sums_and_entries():
    rng = random.Random(7002)
    for _ in range(100):
        a = random_valid_analysis(rng, max_nv=12)
        for m in cluster_stack(a).layers:
            assert np.array_equal(m.data.sum(axis=1), np.ones(m.rows))
            assert set(np.unique(m.data)) <= {0.0, 0.5, 1.0}


def test_survivors_are_one_hot_on_their_own_column(fixture_b):
    m = cluster_stack(fixture_b).layers[0]
    for col, ref in enumerate(m.col_labels):
        row = m.row_labels.index(ref)
        assert m.data[row, col] == 1.0
        assert m.data[row].sum() == 1.0


def test_compose_bounds(fixture_a):
    stack = cluster_stack(fixture_a)
    for i, j in ((-1, 2), (0, 4), (2, 2), (3, 1)):
        with pytest.raises(SchaError) as exc:
            compose(stack, i, j)
        assert exc.value.code == "E_BOUNDS"


def test_compose_partial_products(fixture_a):
    stack = cluster_stack(fixture_a)
    full = compose(stack, 0, 3)
    assert np.allclose(compose(stack, 0, 2) @ stack.layers[2].data, full)
    assert compose(stack, 1, 2).shape == (4, 3)


def test_compose_single_factor_is_a_copy(fixture_a):
    stack = cluster_stack(fixture_a)
    one = compose(stack, 0, 1)
    one[0, 0] = 99.0
    assert stack.layers[0].data[0, 0] == 1.0


# ---------------------------------------------------------------------------
# Prolongations
# ---------------------------------------------------------------------------


def test_fixture_a_prolongation_pair_counts(fixture_a):
    assert len(prolongations_at_level(fixture_a, 1)) == 3
    assert len(prolongations_at_level(fixture_a, 2)) == 2
    assert len(prolongations_at_level(fixture_a, 3)) == 1


def test_fixture_a_non_trivial_prolongations(fixture_a):
    triples = [
        (p.level, labels([p.start])[0], labels(p.middles), labels([p.end])[0])
        for p in all_prolongations(fixture_a).non_trivial()
    ]
    assert triples == [
        (1, "sop:1", ["sop:2"], "sop:3"),
        (2, "sop:0", ["sop:1", "sop:2"], "sop:3"),
        (3, "sop:0", ["sop:1", "sop:2", "sop:3"], "sop:4"),
    ]


def test_kirlin_text(fixture_a):
    assert export_kirlin_text(fixture_a) == (
        "sop:1 ( sop:2 ) sop:3\n"
        "sop:0 ( sop:1 sop:2 ) sop:3\n"
        "sop:0 ( sop:1 sop:2 sop:3 ) sop:4\n"
    )


def test_prolongation_level_bounds(fixture_a):
    for level in (0, 4):
        with pytest.raises(SchaError) as exc:
            prolongations_at_level(fixture_a, level)
        assert exc.value.code == "E_LEVEL"


def test_middles_have_depth_below_level(fixture_b):
    for p in all_prolongations(fixture_b).derived:
        for part, i in p.middles:
            ev = fixture_b.voice(part).slots[i]
            assert ev.depth < p.level
            assert p.start[1] < i < p.end[1]


def test_all_zero_depths_yield_no_prolongations():
    a = build({"bass": {"pitches": ["C3", "D3"], "depths": [0, 0]}})
    assert all_prolongations(a).derived == ()


def test_custom_prolongations_pass_through():
    doc = {
        "key": KEY,
        "voices": {"sop": {"pitches": ["C5", "D5"], "depths": [1, 0]}},
        "customProlongations": [{"start": ["sop", 0], "end": ["sop", 1], "label": "nb"}],
    }
    ps = all_prolongations(parse_analysis(json.dumps(doc)))
    assert ps.custom == ({"start": ["sop", 0], "end": ["sop", 1], "label": "nb"},)


def test_middle_partition_property():
    # every sub-level note is a middle of exactly one same-voice prolongation
    # at that level unless it sits outside the voice's survivor span
    rng = random.Random(7003)
    for _ in range(60):
        a = random_valid_analysis(rng, max_nv=12)
        for level in range(1, a.max_depth + 1):
            pairs = prolongations_at_level(a, level)
            for v in a.voices:
                survivors = [i for i, ev in v.pitched() if ev.depth >= level]
                for i, ev in v.pitched():
                    if ev.depth >= level:
                        continue
                    containing = [
                        p for p in pairs if p.voice is v.part and p.start[1] < i < p.end[1]
                    ]
                    if survivors and survivors[0] < i < survivors[-1]:
                        assert len(containing) == 1
                    else:
                        assert containing == []


# ---------------------------------------------------------------------------
# Oracle equivalence
# ---------------------------------------------------------------------------


def test_oracle_matches_fixture_a(fixture_a):
    stack = cluster_stack(fixture_a)
    got = compose(stack, 0, len(stack.layers))
    want = oracle_matrix(fixture_a)
    assert got.shape == (len(want), len(want[0]))
    for r, row in enumerate(want):
        for c, val in enumerate(row):
            assert abs(got[r, c] - float(val)) <= 1e-12


def test_oracle_matches_fixture_b(fixture_b):
    stack = cluster_stack(fixture_b)
    got = compose(stack, 0, len(stack.layers))
    want = oracle_matrix(fixture_b)
    for r, row in enumerate(want):
        for c, val in enumerate(row):
            assert abs(got[r, c] - float(val)) <= 1e-12


def test_oracle_matches_on_random_small_analyses():
    rng = random.Random(7004)
    for _ in range(50):
        a = random_valid_analysis(rng, max_nv=2)
        stack = cluster_stack(a)
        if not stack.layers:
            continue
        got = compose(stack, 0, len(stack.layers))
        want = oracle_matrix(a)
        assert got.shape == (len(want), len(want[0]) if want else 0)
        for r, row in enumerate(want):
            for c, val in enumerate(row):
                assert abs(got[r, c] - float(val)) <= 1e-12
