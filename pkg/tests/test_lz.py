import itertools
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import lz76_textbook
from ragacausal.errors import EmptySequence
from ragacausal.lz import conditional_complexity, lz76_complexity, lz76_naive
from ragacausal.melody import SymbolSequence


def C(s):
    return lz76_complexity(s).phrase_count


@pytest.mark.parametrize("text,expected", [
    ("a", 1), ("aa", 2), ("ab", 2), ("aaaaaaaa", 2),
    ("01", 2), ("0101", 3), ("010101", 3),
    ("0001101001000101", 6),
])
def test_hand_parsed(text, expected):
    assert C(text) == expected


def test_boundaries_of_classic_example():
    cv = lz76_complexity("0001101001000101", boundaries=True)
    # 0 | 001 | 10 | 100 | 1000 | 101
    assert cv.parse_boundaries == (1, 4, 6, 9, 13, 16)


def test_empty_sequence_rejected():
    with pytest.raises(EmptySequence):
        C("")


def test_all_binary_strings_up_to_8_against_textbook():
    for n in range(1, 9):
        for bits in itertools.product((0, 1), repeat=n):
            assert C(np.array(bits)) == lz76_textbook(bits), bits


@given(st.lists(st.integers(0, 5), min_size=1, max_size=60))
def test_matches_textbook(xs):
    assert C(np.array(xs)) == lz76_textbook(xs)


@given(st.lists(st.integers(-256, 10_000), min_size=1, max_size=80))
def test_matches_naive_on_sparse_alphabets(xs):
    assert C(np.array(xs)) == lz76_naive(xs)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=50))
def test_relabelling_invariance(xs):
    perm = {0: 7, 1: 100, 2: -3, 3: 42}
    assert C(np.array(xs)) == C(np.array([perm[x] for x in xs]))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=40),
       st.lists(st.integers(0, 3), min_size=1, max_size=40))
def test_prefix_monotone(xs, ys):
    # extending a sequence never removes phrases
    assert C(np.array(xs + ys)) >= C(np.array(xs))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=100))
def test_boundaries_partition(xs):
    cv = lz76_complexity(np.array(xs), boundaries=True)
    b = cv.parse_boundaries
    assert len(b) == cv.phrase_count
    assert b[-1] == len(xs)
    assert list(b) == sorted(set(b))


def test_accepts_symbol_sequences_and_lists():
    seq = SymbolSequence(np.array([1, 1, 2, 1]))
    assert C(seq) == C([1, 1, 2, 1]) == C(np.array([1, 1, 2, 1]))


def test_conditional_is_concatenation():
    assert conditional_complexity("01", "0101").phrase_count == C("010101")


def test_long_constant_run_is_fast():
    x = np.full(200_000, 5)
    t = time.perf_counter()
    assert C(x) == 2
    assert time.perf_counter() - t < 1.0
