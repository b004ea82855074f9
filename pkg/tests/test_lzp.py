import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import lz76_textbook
from ragacausal.errors import EmptySequence, LengthMismatch, NoCrossPairs
from ragacausal.lzp import (
    Decision, accuracy_pct, build_graph, causal_accuracy, cross_pair_count, direction,
    graph_to_dict, penalty, to_dot,
)
from ragacausal.melody import SequenceLabel, SymbolSequence
from ragacausal.raga import Group

seqs = st.lists(st.integers(0, 3), min_size=1, max_size=40)


def labelled(symbols, name, group):
    return SymbolSequence(np.asarray(symbols, dtype=np.int64), SequenceLabel(name, group))


def test_hand_penalties():
    assert penalty("01", "0101") == 0
    assert penalty("0101", "01") == 1
    assert direction("01", "0101").decision is Decision.X_CAUSES_Y


@given(seqs, seqs)
def test_penalty_against_textbook(x, y):
    assert penalty(x, y) == lz76_textbook(x + y) - lz76_textbook(y)


@given(seqs, seqs)
def test_direction_antisymmetric(x, y):
    a, b = direction(x, y), direction(y, x)
    assert (a.p_xy, a.p_yx) == (b.p_yx, b.p_xy)
    flipped = {Decision.X_CAUSES_Y: Decision.Y_CAUSES_X,
               Decision.Y_CAUSES_X: Decision.X_CAUSES_Y, Decision.TIE: Decision.TIE}
    assert b.decision is flipped[a.decision]


@given(seqs)
def test_self_pair_ties(x):
    assert direction(x, x).decision is Decision.TIE


def test_empty_penalty():
    with pytest.raises(EmptySequence):
        penalty([], [1])


def test_cross_pair_count():
    assert cross_pair_count(6, 4) == 24
    assert cross_pair_count(56, 54) == 3024


def test_accuracy_pct():
    assert accuracy_pct(12, 24) == 50.0
    with pytest.raises(NoCrossPairs):
        accuracy_pct(0, 0)


def _pool(rng, n_mela=3, n_janya=2, length=300):
    pool = []
    for i in range(n_mela):
        pool.append(labelled(rng.integers(0, 6, length), f"m{i}", Group.MELAKARTA))
    for i in range(n_janya):
        pool.append(labelled(rng.integers(0, 3, length), f"j{i}", Group.JANYA))
    return pool


@given(st.integers(0, 2**31 - 1))
def test_graph_is_consistent_with_pairwise_directions(seed):
    pool = _pool(np.random.default_rng(seed), 2, 2, 60)
    g = build_graph(pool, workers=2)
    n = len(pool)
    assert len(g.edges) + len(g.ties) == n * (n - 1) // 2
    for cause, effect, margin in g.edges:
        pp = direction(pool[cause], pool[effect])
        assert pp.decision is Decision.X_CAUSES_Y
        assert margin == pp.p_yx - pp.p_xy > 0
    for i, j in g.ties:
        assert direction(pool[i], pool[j]).decision is Decision.TIE


def test_graph_independent_of_worker_count():
    pool = _pool(np.random.default_rng(3))
    a, b = build_graph(pool, workers=1), build_graph(pool, workers=4)
    assert a.edges == b.edges and a.ties == b.ties
    assert (a.penalties == b.penalties).all()


def test_accuracy_counts_only_mela_to_janya():
    pool = _pool(np.random.default_rng(5))
    g = build_graph(pool)
    acc = causal_accuracy(g)
    assert acc.E == 6
    expected = sum(
        1 for c, e, _ in g.edges
        if pool[c].label.group is Group.MELAKARTA and pool[e].label.group is Group.JANYA
    )
    assert acc.E_prime == expected
    assert acc.accuracy_pct == pytest.approx(expected / 6 * 100)


def test_no_cross_pairs():
    rng = np.random.default_rng(0)
    pool = [labelled(rng.integers(0, 3, 50), f"m{i}", Group.MELAKARTA) for i in range(3)]
    with pytest.raises(NoCrossPairs):
        causal_accuracy(build_graph(pool))


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        build_graph([labelled([1, 2], "a", Group.MELAKARTA), labelled([1], "b", Group.JANYA)])


def test_cycle_detection():
    # short random sequences give intransitive triples often enough
    rng = np.random.default_rng(0)
    for _ in range(200):
        pool = [labelled(rng.integers(0, 3, 12), f"s{i}", Group.MELAKARTA) for i in range(5)]
        g = build_graph(pool, workers=1)
        if g.has_cycle:
            cyc = g.cycle
            edges = {(c, e) for c, e, _ in g.edges}
            assert cyc[0] == cyc[-1]
            assert all((a, b) in edges for a, b in zip(cyc, cyc[1:]))
            return
    pytest.fail("no cyclic tournament found")


def test_dot_output():
    pool = [labelled([0, 1, 0, 1], "mela one", Group.MELAKARTA), labelled([0, 0, 0, 1], "j", Group.JANYA)]
    g = build_graph(pool)
    dot = to_dot(g, "LR").decode()
    assert dot.startswith("digraph lzp {\n  rankdir=LR;")
    assert '"mela one" [style=filled, fillcolor=black, fontcolor=white];' in dot
    assert "  j;" in dot
    assert dot.count("->") == len(g.edges)
    assert "penalty_margin=" in dot or g.ties


def test_graph_dict_names_unique():
    pool = [labelled([0, 1, 2], "x", Group.MELAKARTA), labelled([0, 0, 2], "x", Group.JANYA)]
    d = graph_to_dict(build_graph(pool))
    assert [n["name"] for n in d["nodes"]] == ["x", "x_1"]
