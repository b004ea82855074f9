"""Plain-text svara notation -> measure-tracked note events.

Input format, one composition per file::

    # comment lines start with '#'
    tala: adi beats: 8
    G dsns d pdpP, g M P ; ||
    S R G M | P D N S' ||

Uppercase svaras last one count, lowercase half a count, ``;`` and ``,``
are rests of one and half a count. ``||`` closes an avartana, a single
``|`` is decorative. A trailing ``'`` or ``.`` raises or lowers a svara by
an octave; without marks the octave is inferred from melodic jumps.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import EmptyComposition, UnknownToken, ZeroDurationMeasure
from .raga import (
    LETTERS,
    LOWER_OCTAVE_MARK,
    REST,
    UPPER_OCTAVE_MARK,
    Group,
    Origin,
    RagaScale,
    dha_index,
    pitch_letters,
    svara_to_index,
)

log = logging.getLogger(__name__)

HEADER_RE = re.compile(r"^\s*tala\s*:\s*(\S+)\s+beats\s*:\s*(\d+)\s*$", re.IGNORECASE)
_SVARA_CHARS = set(LETTERS + LETTERS.lower())


@dataclass(frozen=True)
class NoteEvent:
    """One note event: pitch index ``a``, duration ``b`` in counts, measure ``c``."""

    a: float
    b: float
    c: int

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"note duration must be positive, got {self.b}")
        if self.c < 0:
            raise ValueError(f"measure index must be non-negative, got {self.c}")

    @property
    def is_rest(self) -> bool:
        return self.a == REST


@dataclass
class Composition:
    events: list[NoteEvent]
    raga_id: str
    theta: int
    source_name: str = ""
    group: Group = Group.MELAKARTA
    origin: Origin = Origin.ORIGINAL
    underfull_measures: list[int] = field(default_factory=list)

    def pitches(self) -> list[float]:
        return [e.a for e in self.events]

    def __len__(self):
        return len(self.events)


@dataclass
class ParseOptions:
    # None picks 7 semitones, or 5 degrees for a seven-tonal scale
    octave_jump_threshold: int | None = None
    clamp_low: int | None = None
    clamp_high: int | None = None
    apply_anya_rules: bool = True

    def __post_init__(self):
        if self.octave_jump_threshold is not None and self.octave_jump_threshold < 1:
            raise ValueError("octave_jump_threshold must be >= 1")

    def threshold_for(self, span: int) -> int:
        if self.octave_jump_threshold is not None:
            return self.octave_jump_threshold
        return 7 if span == 12 else 5

    def clamp_for(self, span: int) -> tuple[int, int]:
        low = -span if self.clamp_low is None else self.clamp_low
        high = 2 * span if self.clamp_high is None else self.clamp_high
        return low, high


@dataclass
class _Token:
    kind: str  # "svara" or "bar"
    text: str
    line: int
    column: int


def _tokenize(text: str):
    """Yield header (tala, beats) tuples and notation tokens."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = HEADER_RE.match(line)
        if m:
            yield ("header", m.group(1), int(m.group(2)))
            continue
        i, n = 0, len(line)
        while i < n:
            ch = line[i]
            col = i + 1
            if ch.isspace():
                i += 1
            elif ch == "|":
                if i + 1 < n and line[i + 1] == "|":
                    yield _Token("bar", "||", lineno, col)
                    i += 2
                else:
                    i += 1
            elif ch in ";,":
                yield _Token("svara", ch, lineno, col)
                i += 1
            elif ch in _SVARA_CHARS:
                j = i + 1
                while j < n and line[j] in (UPPER_OCTAVE_MARK, LOWER_OCTAVE_MARK):
                    j += 1
                yield _Token("svara", line[i:j], lineno, col)
                i = j
            else:
                raise UnknownToken(ch, lineno, col)


def normalize_avartana(measure_events: list[NoteEvent], theta: float) -> list[NoteEvent]:
    """Scale an over-full measure down to ``theta`` counts.

    Measures at or under ``theta`` are returned unchanged.
    """
    total = math.fsum(e.b for e in measure_events)
    if total <= 0:
        raise ZeroDurationMeasure("measure has zero total duration")
    if total <= theta:
        return list(measure_events)
    return [replace(e, b=e.b / total * theta) for e in measure_events]


def _fold(pitch: int, low: int, high: int, span: int) -> int:
    while pitch < low:
        pitch += span
    while pitch > high:
        pitch -= span
    return pitch


def resolve_octave(
    events: list[NoteEvent],
    scale: RagaScale,
    opts: ParseOptions | None = None,
    fixed: list[bool] | None = None,
) -> list[NoteEvent]:
    """Infer octaves from melodic jumps, left to right.

    A pitch more than the threshold away from the previous sounded pitch
    (rests skipped) moves down an octave when it sits at or above D and up
    an octave otherwise. Events flagged in ``fixed`` carry explicit octave
    marks and are never moved, though they still serve as reference.
    """
    opts = opts or ParseOptions()
    span = scale.octave_span
    threshold = opts.threshold_for(span)
    low, high = opts.clamp_for(span)
    pivot = dha_index(scale)
    out = []
    prev = None
    for i, ev in enumerate(events):
        if ev.is_rest:
            out.append(ev)
            continue
        a = int(ev.a)
        if prev is not None and not (fixed and fixed[i]) and abs(a - prev) > threshold:
            a = a - span if a >= pivot else a + span
        a = _fold(a, low, high, span)
        out.append(ev if a == ev.a else replace(ev, a=a))
        prev = a
    return out


def relabel_anya_svara(events: list[NoteEvent], scale: RagaScale) -> list[NoteEvent]:
    """Apply the scale's anya-svara rules, e.g. N -> N3 inside a P N D phrase.

    Only past svaras are consulted: when the last svara of a trigger is
    reached, the two previously sounded svaras (rests skipped) are checked.
    """
    if not scale.anya_rules:
        return list(events)
    span = scale.octave_span
    letters = pitch_letters(scale)
    out = list(events)
    history: list[tuple[int, str]] = []  # (event index, letter) of sounded svaras
    for i, ev in enumerate(events):
        if ev.is_rest:
            continue
        a = int(ev.a)
        letter = letters.get(a % span)
        for rule in scale.anya_rules:
            first, second, third = rule.trigger_pattern
            if (
                letter == third
                and len(history) >= 2
                and history[-1][1] == second
                and history[-2][1] == first
            ):
                target = (history[-2][0], history[-1][0], i)[rule.affected_position]
                old = int(out[target].a)
                octave = math.floor(old / span) * span
                out[target] = replace(out[target], a=octave + rule.replacement_index)
        history.append((i, letter))
        if len(history) > 2:
            history.pop(0)
    return out


def parse_composition(
    text: str,
    scale: RagaScale,
    theta: int | None = None,
    opts: ParseOptions | None = None,
    source_name: str = "",
    default_theta: int | None = None,
) -> Composition:
    """Parse a notation document into a Composition.

    ``theta`` (beats per avartana) overrides the document's ``tala:`` header;
    ``default_theta`` applies only when neither is present.
    """
    opts = opts or ParseOptions()
    raw: list[NoteEvent] = []
    fixed: list[bool] = []
    header_theta = None
    measure = 0
    measure_start = 0
    complete: list[tuple[int, int]] = []  # [start, end) event ranges of closed measures
    for tok in _tokenize(text):
        if isinstance(tok, tuple):
            header_theta = tok[2]
            continue
        if tok.kind == "bar":
            if measure_start == len(raw):
                raise ZeroDurationMeasure(
                    f"empty avartana closed at line {tok.line}, column {tok.column}"
                )
            complete.append((measure_start, len(raw)))
            measure += 1
            measure_start = len(raw)
            continue
        try:
            pitch, dur = svara_to_index(tok.text, scale)
        except UnknownToken as exc:
            raise UnknownToken(exc.token, tok.line, tok.column) from None
        raw.append(NoteEvent(pitch, dur, measure))
        fixed.append(len(tok.text) > 1)

    if not raw:
        raise EmptyComposition(f"no note events in {source_name or 'document'}")
    if theta is None:
        theta = header_theta if header_theta is not None else default_theta
    if theta is None or theta <= 0:
        raise ValueError("beats per avartana (theta) must be given and positive")

    events = resolve_octave(raw, scale, opts, fixed)
    if opts.apply_anya_rules:
        events = relabel_anya_svara(events, scale)

    underfull = []
    for start, end in complete:
        chunk = events[start:end]
        total = math.fsum(e.b for e in chunk)
        if total < theta - 1e-9:
            underfull.append(chunk[0].c)
        events[start:end] = normalize_avartana(chunk, theta)
    if underfull:
        log.info("%s: %d under-full avartana(s): %s", source_name or "composition",
                 len(underfull), underfull)

    return Composition(
        events=events,
        raga_id=scale.raga_id,
        theta=int(theta),
        source_name=source_name,
        group=scale.group,
        underfull_measures=underfull,
    )


def parse_file(path: str | Path, scale: RagaScale, theta: int | None = None,
               opts: ParseOptions | None = None,
               default_theta: int | None = None) -> Composition:
    path = Path(path)
    return parse_composition(path.read_text("utf-8"), scale, theta, opts,
                             source_name=path.stem, default_theta=default_theta)


def _fmt_number(x: float) -> str:
    if x == REST:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def emit_csv(comp: Composition) -> bytes:
    """Serialize events as ``a,b,c`` rows; rests are written as ``inf``."""
    buf = io.StringIO()
    buf.write("a,b,c\n")
    for e in comp.events:
        buf.write(f"{_fmt_number(e.a)},{_fmt_number(e.b)},{e.c}\n")
    return buf.getvalue().encode("utf-8")


def parse_csv(data: bytes | str) -> list[NoteEvent]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(data))
    events = []
    for row in reader:
        a = float(row["a"])
        events.append(NoteEvent(a if a == REST else int(a), float(row["b"]), int(row["c"])))
    return events


def read_csv_composition(
    path: str | Path,
    raga_id: str = "",
    theta: int = 0,
    group: Group = Group.MELAKARTA,
    origin: Origin = Origin.ORIGINAL,
) -> Composition:
    path = Path(path)
    return Composition(
        events=parse_csv(path.read_bytes()),
        raga_id=raga_id,
        theta=theta,
        source_name=path.stem,
        group=group,
        origin=origin,
    )
