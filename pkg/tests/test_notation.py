import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import normalize_exact
from ragacausal.errors import EmptyComposition, UnknownToken, ZeroDurationMeasure
from ragacausal.notation import (
    NoteEvent, ParseOptions, emit_csv, normalize_avartana, parse_composition, parse_csv,
    relabel_anya_svara, resolve_octave,
)
from ragacausal.raga import REST, lookup_scale

MMG = lookup_scale("15")
SANKARABHARANAM = lookup_scale("29")
KAMBHOJI = lookup_scale("28_k")


def durations(comp):
    return [e.b for e in comp.events]


def test_example_phrase_event_count_and_raw_total():
    comp = parse_composition("G dsns d pdpP, g M P ;||", SANKARABHARANAM, theta=100)
    # theta 100 leaves the raw durations alone
    assert len(comp) == 15
    assert math.fsum(durations(comp)) == pytest.approx(10.0)


def test_plain_measure_untouched():
    comp = parse_composition("S R G M ||", MMG, theta=4)
    assert durations(comp) == [1.0] * 4
    assert [e.c for e in comp.events] == [0] * 4


def test_underfull_measure_kept_and_reported():
    comp = parse_composition("S R ||", MMG, theta=4)
    assert durations(comp) == [1.0, 1.0]
    assert comp.underfull_measures == [0]


def test_single_bar_is_decorative():
    comp = parse_composition("S R | G M || P D | N S' ||", MMG, theta=4)
    assert [e.c for e in comp.events] == [0] * 4 + [1] * 4


def test_header_sets_theta_and_argument_overrides():
    text = "# comment\ntala: rupaka beats: 6\nS R G M P D N S' ||\n"
    assert parse_composition(text, MMG).theta == 6
    assert math.fsum(durations(parse_composition(text, MMG))) == pytest.approx(6)
    assert parse_composition(text, MMG, theta=8).theta == 8


def test_missing_theta():
    with pytest.raises(ValueError):
        parse_composition("S R ||", MMG)
    assert parse_composition("S R ||", MMG, default_theta=4).theta == 4


def test_unknown_token_position():
    with pytest.raises(UnknownToken) as info:
        parse_composition("S R\nG x M ||", MMG, theta=4)
    assert (info.value.line, info.value.column) == (2, 3)


def test_letter_outside_raga_reports_position():
    with pytest.raises(UnknownToken) as info:
        parse_composition("S M ||", lookup_scale("29_h"), theta=4)
    assert info.value.line == 1 and info.value.column == 3


def test_empty_inputs():
    with pytest.raises(EmptyComposition):
        parse_composition("# nothing\n", MMG, theta=4)
    with pytest.raises(ZeroDurationMeasure):
        parse_composition("S R || ||", MMG, theta=4)


def test_trailing_unclosed_measure_not_normalized():
    comp = parse_composition("S R G M || S R G M P D", MMG, theta=4)
    assert durations(comp)[4:] == [1.0] * 6


def test_octave_jump_goes_down_from_dha():
    # S then N: 11 semitones up reads as the N just below S
    comp = parse_composition("S N ||", MMG, theta=4)
    assert comp.pitches() == [0, -1]


def test_octave_jump_goes_up_below_dha():
    comp = parse_composition("N. S R ||", MMG, theta=4)
    assert comp.pitches() == [-1, 0, 1]
    comp = parse_composition("D N S ||", MMG, theta=4)
    assert comp.pitches() == [8, 11, 12]


def test_explicit_octave_is_kept():
    comp = parse_composition("S N' ||", MMG, theta=4)
    assert comp.pitches() == [0, 23]


def test_rests_are_skipped_for_jumps():
    comp = parse_composition("S ; N ||", MMG, theta=4)
    assert comp.pitches()[2] == -1
    assert comp.pitches()[1] == REST


@given(st.lists(st.integers(0, 11), min_size=1, max_size=40), st.integers(1, 11))
def test_resolved_jumps_respect_threshold(raw, threshold):
    events = [NoteEvent(a, 1.0, 0) for a in raw]
    out = resolve_octave(events, MMG, ParseOptions(octave_jump_threshold=threshold))
    pitches = [e.a for e in out]
    assert all(-12 <= p <= 24 for p in pitches)
    assert all(p % 12 == r for p, r in zip(pitches, raw))


def test_anya_relabel_in_pnd():
    comp = parse_composition("P N D P N S' ||", KAMBHOJI, theta=6)
    # N3 only inside P N D; the second N is followed by S'
    assert comp.pitches() == [7, 11, 9, 7, 10, 12]


def test_anya_relabel_skips_rests():
    comp = parse_composition("P ; N , D ||", KAMBHOJI, theta=8)
    assert comp.pitches()[2] == 11


def test_anya_rules_can_be_disabled():
    comp = parse_composition("P N D ||", KAMBHOJI, theta=3,
                             opts=ParseOptions(apply_anya_rules=False))
    assert comp.pitches() == [7, 10, 9]


def test_relabel_noop_without_rules():
    events = [NoteEvent(7, 1, 0), NoteEvent(11, 1, 0), NoteEvent(8, 1, 0)]
    assert relabel_anya_svara(events, MMG) == events


@given(st.lists(st.sampled_from([0.25, 0.5, 1.0, 2.0]), min_size=1, max_size=30),
       st.integers(1, 16))
def test_normalization_matches_exact_arithmetic(ds, theta):
    events = [NoteEvent(0, d, 0) for d in ds]
    got = [e.b for e in normalize_avartana(events, theta)]
    want = normalize_exact(ds, theta)
    assert got == pytest.approx([float(w) for w in want], abs=1e-9)
    assert math.fsum(got) <= theta + 1e-9


@given(st.lists(st.tuples(
    st.one_of(st.integers(-12, 24), st.just(REST)),
    st.sampled_from([0.125, 0.25, 0.5, 1.0, 1 / 3, 0.4]),
    st.integers(0, 20)), min_size=1, max_size=30))
def test_csv_round_trip(rows):
    from ragacausal.notation import Composition
    comp = Composition([NoteEvent(a, b, c) for a, b, c in rows], "15", 8)
    assert parse_csv(emit_csv(comp)) == comp.events


def test_csv_format():
    from ragacausal.notation import Composition
    comp = Composition([NoteEvent(4, 1.0, 0), NoteEvent(REST, 0.5, 1)], "15", 8)
    assert emit_csv(comp) == b"a,b,c\n4,1,0\ninf,0.5,1\n"


def test_bundled_corpora_parse(corpora):
    for raga in ("15", "15_m"):
        for path in sorted((corpora / raga).glob("*.txt")):
            comp = parse_composition(path.read_text(), lookup_scale(raga))
            for m in {e.c for e in comp.events}:
                total = math.fsum(e.b for e in comp.events if e.c == m)
                assert total == pytest.approx(comp.theta)
