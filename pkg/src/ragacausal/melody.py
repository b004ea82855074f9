"""Compositions -> integer melody streams, and equal-length windowing."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyPool, MinLengthZero, NegativeSymbol, WindowTooLong
from .notation import Composition
from .raga import Group, Origin

TICKS_PER_COUNT = 480
TRANSPOSE = 36
# outside every reachable pitch + TRANSPOSE
REST_SYMBOL = 100


@dataclass(frozen=True)
class SequenceLabel:
    composition_name: str
    group: Group
    origin: Origin = Origin.ORIGINAL
    raga_id: str = ""

    @classmethod
    def of(cls, comp: Composition) -> "SequenceLabel":
        return cls(comp.source_name, comp.group, comp.origin, comp.raga_id)


@dataclass
class SymbolSequence:
    symbols: np.ndarray
    label: SequenceLabel | None = None

    def __len__(self):
        return int(self.symbols.shape[0])


def ticks(duration: float) -> int:
    """Integer repetitions for a duration in counts.

    The product is rounded to 9 decimals before the ceiling so that float
    noise such as 480 * (1/3) = 160.00000000000003 does not add a tick.
    """
    return math.ceil(round(duration * TICKS_PER_COUNT, 9))


def expand(comp: Composition, label: SequenceLabel | None = None) -> SymbolSequence:
    """Repeat every transposed pitch once per tick of its duration."""
    values = []
    counts = []
    for ev in comp.events:
        if ev.is_rest:
            sym = REST_SYMBOL
        else:
            sym = int(ev.a) + TRANSPOSE
            if sym < 0:
                raise NegativeSymbol(
                    f"pitch {ev.a} transposes to {sym}; check the parser clamp range"
                )
        values.append(sym)
        counts.append(ticks(ev.b))
    symbols = np.repeat(np.asarray(values, dtype=np.int64), np.asarray(counts, dtype=np.int64))
    return SymbolSequence(symbols, label if label is not None else SequenceLabel.of(comp))


def pool_min_length(pool: list[SymbolSequence]) -> int:
    if not pool:
        raise EmptyPool("cannot take the minimum length of an empty pool")
    return min(len(s) for s in pool)


def sample_subsequence(
    seq: SymbolSequence, n_min: int, rng: np.random.Generator
) -> SymbolSequence:
    """Uniformly placed contiguous window of ``n_min`` symbols.

    A sequence that is already ``n_min`` long is returned whole.
    """
    n = len(seq)
    if n_min <= 0:
        raise MinLengthZero("window length must be positive")
    if n_min > n:
        raise WindowTooLong(f"window of {n_min} exceeds sequence length {n}")
    if n_min == n:
        return seq
    start = int(rng.integers(0, n - n_min + 1))
    return SymbolSequence(seq.symbols[start : start + n_min], seq.label)


def write_seq(seq: SymbolSequence, path: str | Path) -> None:
    """One integer per line."""
    np.savetxt(path, seq.symbols, fmt="%d")


def read_seq(path: str | Path, label: SequenceLabel | None = None) -> SymbolSequence:
    symbols = np.loadtxt(path, dtype=np.int64, ndmin=1)
    return SymbolSequence(symbols, label)
