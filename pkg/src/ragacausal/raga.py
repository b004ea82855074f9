"""Pitch-index systems, the raga scale database and svara token lookup."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import AmbiguousSvara, UnknownRaga, UnknownToken

REST = math.inf

LETTERS = "SRGMPDN"

# variant token -> twelve-tone index
TWELVE_TONE_INDEX = {
    "S": 0,
    "R1": 1, "R2": 2, "R3": 3,
    "G1": 2, "G2": 3, "G3": 4,
    "M1": 5, "M2": 6,
    "P": 7,
    "D1": 8, "D2": 9, "D3": 10,
    "N1": 9, "N2": 10, "N3": 11,
}

UPPER_OCTAVE_MARK = "'"
LOWER_OCTAVE_MARK = "."


class TonalKind(Enum):
    SEVEN = "seven"
    TWELVE = "twelve"


@dataclass(frozen=True)
class TonalSystem:
    kind: TonalKind

    @property
    def octave_span(self) -> int:
        return 7 if self.kind is TonalKind.SEVEN else 12


SEVEN_TONAL = TonalSystem(TonalKind.SEVEN)
TWELVE_TONAL = TonalSystem(TonalKind.TWELVE)


class Group(Enum):
    MELAKARTA = "melakarta"
    JANYA = "janya"


class Origin(Enum):
    ORIGINAL = "original"
    SURROGATE = "surrogate"


@dataclass(frozen=True)
class AnyaRule:
    """Relabel one svara of a triple when the full triple is seen, e.g. P N D."""

    trigger_pattern: tuple[str, str, str]
    affected_position: int
    replacement_index: int

    @property
    def affected_letter(self) -> str:
        return self.trigger_pattern[self.affected_position]


@dataclass(frozen=True)
class RagaScale:
    raga_id: str
    melakarta_index: int
    arohana: tuple[int, ...]
    avarohana: tuple[int, ...]
    tonal_system: TonalSystem = TWELVE_TONAL
    anya_rules: tuple[AnyaRule, ...] = ()
    name: str = ""
    group: Group = Group.MELAKARTA
    # letter -> candidate base indices, from the svara tokens of both kramas
    letter_indices: dict[str, tuple[int, ...]] = field(
        default_factory=dict, compare=False, hash=False
    )
    composition_count: int | None = None

    def __post_init__(self):
        span = self.tonal_system.octave_span
        for idx in self.arohana + self.avarohana:
            if not 0 <= idx < span:
                raise ValueError(f"raga {self.raga_id}: index {idx} outside [0, {span})")
        if 0 not in self.arohana and 0 not in self.avarohana:
            raise ValueError(f"raga {self.raga_id}: scale must contain Sa")
        for rule in self.anya_rules:
            if rule.replacement_index in self.letter_indices.get(rule.affected_letter, ()):
                raise ValueError(
                    f"raga {self.raga_id}: anya replacement {rule.replacement_index} "
                    f"is already the default {rule.affected_letter}"
                )

    @property
    def octave_span(self) -> int:
        return self.tonal_system.octave_span

    @classmethod
    def from_svaras(
        cls,
        raga_id: str,
        melakarta_index: int,
        arohana: list[str],
        avarohana: list[str],
        anya_rules=(),
        name: str = "",
        group: Group = Group.MELAKARTA,
        composition_count: int | None = None,
    ) -> "RagaScale":
        """Build a twelve-tonal scale from variant tokens such as ``"R1"``."""
        letter_indices: dict[str, set[int]] = {}
        aro, ava = [], []
        for tokens, out in ((arohana, aro), (avarohana, ava)):
            for tok in tokens:
                if tok not in TWELVE_TONE_INDEX:
                    raise UnknownToken(tok)
                idx = TWELVE_TONE_INDEX[tok]
                out.append(idx)
                letter_indices.setdefault(tok[0], set()).add(idx)
        return cls(
            raga_id=raga_id,
            melakarta_index=melakarta_index,
            arohana=tuple(aro),
            avarohana=tuple(ava),
            tonal_system=TWELVE_TONAL,
            anya_rules=tuple(anya_rules),
            name=name,
            group=group,
            letter_indices={k: tuple(sorted(v)) for k, v in letter_indices.items()},
            composition_count=composition_count,
        )


def seven_tonal_scale(raga_id: str, group: Group = Group.MELAKARTA) -> RagaScale:
    """Generic scale where each letter is its own degree (S=0 ... N=6)."""
    degrees = tuple(range(7))
    return RagaScale(
        raga_id=raga_id,
        melakarta_index=0,
        arohana=degrees,
        avarohana=tuple(reversed(degrees)),
        tonal_system=SEVEN_TONAL,
        group=group,
        letter_indices={letter: (i,) for i, letter in enumerate(LETTERS)},
    )


def _rule_from_record(rec: dict) -> AnyaRule:
    replacement = rec["replacement"]
    if isinstance(replacement, str):
        replacement = TWELVE_TONE_INDEX[replacement]
    return AnyaRule(tuple(rec["trigger"]), int(rec["position"]), int(replacement))


def load_scale_db(path: str | Path | None = None) -> dict[str, RagaScale]:
    """Load a scale database file; defaults to the bundled one."""
    if path is None:
        text = resources.files("ragacausal.data").joinpath("scales.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    doc = json.loads(text)
    db = {}
    for rec in doc["ragas"]:
        scale = RagaScale.from_svaras(
            raga_id=str(rec["raga_id"]),
            melakarta_index=int(rec["melakarta_index"]),
            arohana=rec["arohana"],
            avarohana=rec["avarohana"],
            anya_rules=[_rule_from_record(r) for r in rec.get("anya_rules", [])],
            name=rec.get("name", ""),
            group=Group(rec.get("group", "melakarta")),
            composition_count=rec.get("compositions"),
        )
        db[scale.raga_id] = scale
    return db


_default_db: dict[str, RagaScale] | None = None


def default_scale_db() -> dict[str, RagaScale]:
    global _default_db
    if _default_db is None:
        _default_db = load_scale_db()
    return _default_db


def lookup_scale(
    raga_id: str, db: dict[str, RagaScale] | None = None, fallback: bool = False
) -> RagaScale:
    """Fetch a scale by id.

    Ragas missing from the database raise UnknownRaga unless ``fallback`` is
    set, in which case a seven-tonal scale is returned with a warning.
    """
    if db is None:
        db = default_scale_db()
    try:
        return db[raga_id]
    except KeyError:
        if not fallback:
            raise UnknownRaga(raga_id) from None
    warnings.warn(
        f"raga {raga_id!r} not in scale database; using the seven-tonal fallback",
        stacklevel=2,
    )
    return seven_tonal_scale(raga_id)


def vocabulary(scale: RagaScale) -> list[int]:
    """Sorted union of both kramas plus any anya replacement indices."""
    vocab = set(scale.arohana) | set(scale.avarohana)
    vocab.update(rule.replacement_index for rule in scale.anya_rules)
    return sorted(vocab)


def letter_index(letter: str, scale: RagaScale) -> int:
    letter = letter.upper()
    candidates = scale.letter_indices.get(letter)
    if not candidates:
        raise UnknownToken(letter + f" (not in raga {scale.raga_id})")
    if len(candidates) > 1:
        raise AmbiguousSvara(
            f"raga {scale.raga_id}: letter {letter} maps to {list(candidates)}"
        )
    return candidates[0]


def svara_to_index(token: str, scale: RagaScale) -> tuple[float, float]:
    """Map a notation token to ``(pitch, duration_hint)``.

    Uppercase letters last one count, lowercase half a count. ``;`` and
    ``,`` are rests of one and half a count. Trailing ``'`` / ``.`` marks
    move the pitch up / down an octave each.
    """
    if token == ";":
        return REST, 1.0
    if token == ",":
        return REST, 0.5
    if not token or token[0].upper() not in LETTERS:
        raise UnknownToken(token)
    letter, marks = token[0], token[1:]
    shift = 0
    for mark in marks:
        if mark == UPPER_OCTAVE_MARK:
            shift += 1
        elif mark == LOWER_OCTAVE_MARK:
            shift -= 1
        else:
            raise UnknownToken(token)
    pitch = letter_index(letter, scale) + shift * scale.octave_span
    return pitch, 1.0 if letter.isupper() else 0.5


def pitch_letters(scale: RagaScale) -> dict[int, str]:
    """Base index -> svara letter, anya replacements included."""
    out = {}
    for letter, indices in scale.letter_indices.items():
        for idx in indices:
            out[idx] = letter
    for rule in scale.anya_rules:
        out[rule.replacement_index] = rule.affected_letter
    return out


def dha_index(scale: RagaScale) -> int:
    """Pivot for octave resolution: the scale's D, else the lowest D position."""
    candidates = scale.letter_indices.get("D")
    if candidates:
        return candidates[0]
    return 5 if scale.octave_span == 7 else TWELVE_TONE_INDEX["D1"]


def core_pitches(scale: RagaScale, low: int | None = None, high: int | None = None) -> frozenset:
    """Vocabulary pitches inside the usual two-octave span, lower P to upper P.

    Rests are always part of the core.
    """
    span = scale.octave_span
    pa = 4 if span == 7 else TWELVE_TONE_INDEX["P"]
    if low is None:
        low = pa - span
    if high is None:
        high = pa + span
    vocab = set(vocabulary(scale))
    pitches = {p for p in range(low, high + 1) if p % span in vocab}
    pitches.add(REST)
    return frozenset(pitches)
