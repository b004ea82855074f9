import math

import pytest

from ragacausal.errors import AmbiguousSvara, UnknownRaga, UnknownToken
from ragacausal.raga import (
    REST, Group, RagaScale, core_pitches, dha_index, letter_index, load_scale_db,
    lookup_scale, seven_tonal_scale, svara_to_index, vocabulary,
)


@pytest.fixture(scope="module")
def db():
    return load_scale_db()


def test_bundled_ragas(db):
    assert set(db) == {"8", "8_d", "15", "15_m", "22", "22_a", "28", "28_k", "29", "29_h", "65"}
    assert db["15"].group is Group.MELAKARTA
    assert db["15_m"].group is Group.JANYA
    assert db["15_m"].melakarta_index == 15


def test_mayamalavagaula_indices(db):
    s = db["15"]
    assert s.arohana == (0, 1, 4, 5, 7, 8, 11)
    assert [letter_index(c, s) for c in "SRGMPDN"] == [0, 1, 4, 5, 7, 8, 11]


def test_janya_letters_come_from_both_kramas(db):
    # Malahari has no ga going up but uses G3 coming down
    assert letter_index("G", db["15_m"]) == 4


def test_case_sets_duration(db):
    assert svara_to_index("G", db["15"]) == (4, 1.0)
    assert svara_to_index("g", db["15"]) == (4, 0.5)


def test_rests():
    s = seven_tonal_scale("x")
    assert svara_to_index(";", s) == (REST, 1.0)
    assert svara_to_index(",", s) == (REST, 0.5)
    assert math.isinf(REST)


def test_octave_marks(db):
    s = db["29"]
    assert svara_to_index("S'", s)[0] == 12
    assert svara_to_index("n.", s)[0] == -1
    assert svara_to_index("P''", s)[0] == 31


def test_letter_missing_from_scale(db):
    with pytest.raises(UnknownToken):
        svara_to_index("M", db["29_h"])
    with pytest.raises(UnknownToken):
        svara_to_index("X", db["15"])


def test_ambiguous_letter():
    s = RagaScale.from_svaras("amb", 1, ["S", "R1", "R2"], ["R2", "R1", "S"])
    with pytest.raises(AmbiguousSvara):
        letter_index("R", s)


def test_unknown_raga(db):
    with pytest.raises(UnknownRaga):
        lookup_scale("999", db)
    with pytest.warns(UserWarning):
        s = lookup_scale("999", db, fallback=True)
    assert s.octave_span == 7
    assert letter_index("N", s) == 6


def test_anya_rule_loaded(db):
    (rule,) = db["28_k"].anya_rules
    assert rule.trigger_pattern == ("P", "N", "D")
    assert rule.affected_letter == "N"
    assert rule.replacement_index == 11
    assert 11 in vocabulary(db["28_k"])


def test_index_bounds_checked():
    with pytest.raises(ValueError):
        RagaScale("bad", 0, (0, 12), (0,))


def test_dha_pivot(db):
    assert dha_index(db["15"]) == 8
    assert dha_index(db["29_h"]) == 8  # no D in Hamsadhwani, falls back to D1
    assert dha_index(seven_tonal_scale("x")) == 5


def test_core_spans_lower_to_upper_pa(db):
    core = core_pitches(db["29_h"])
    sounded = sorted(p for p in core if p != REST)
    assert sounded[0] == -5 and sounded[-1] == 19
    assert REST in core
    assert all(p % 12 in {0, 2, 4, 7, 11} for p in sounded)
