"""Lempel-Ziv (1976) complexity via exhaustive-history parsing.

The parse scans left to right. At position ``i`` the current component
copies the longest ``seq[i:i+L]`` that also starts somewhere before ``i``
(overlap allowed), then takes one fresh symbol. A copy that runs into the
end of the sequence still counts as a component.

Matching uses a suffix automaton of the whole sequence. Every automaton
state carries the end offset of its first occurrence, so "does
``seq[i:i+l]`` start before ``i``" becomes a single comparison while
walking transitions from the root.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import EmptySequence

__all__ = [
    "ComplexityValue",
    "lz76_complexity",
    "conditional_complexity",
    "lz76_naive",
]


@dataclass(frozen=True)
class ComplexityValue:
    phrase_count: int
    parse_boundaries: tuple[int, ...] | None = None

    def __int__(self):
        return self.phrase_count


@numba.njit(cache=True, nogil=True)
def _lz76_kernel(s, sigma, want_bounds):
    n = s.shape[0]
    max_states = 2 * n + 1
    nxt = np.full((max_states, sigma), -1, dtype=np.int32)
    link = np.empty(max_states, dtype=np.int32)
    length = np.zeros(max_states, dtype=np.int32)
    firstpos = np.zeros(max_states, dtype=np.int32)
    link[0] = -1
    size = 1
    last = 0
    for i in range(n):
        c = s[i]
        cur = size
        size += 1
        length[cur] = length[last] + 1
        firstpos[cur] = i
        p = last
        while p != -1 and nxt[p, c] == -1:
            nxt[p, c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = nxt[p, c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = size
                size += 1
                length[clone] = length[p] + 1
                for k in range(sigma):
                    nxt[clone, k] = nxt[q, k]
                link[clone] = link[q]
                firstpos[clone] = firstpos[q]
                while p != -1 and nxt[p, c] == q:
                    nxt[p, c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    bounds = np.empty(n if want_bounds else 0, dtype=np.int64)
    count = 0
    i = 0
    while i < n:
        state = 0
        l = 0
        while i + l < n:
            t = nxt[state, s[i + l]]
            # first occurrence of seq[i:i+l+1] ends at firstpos[t]; starts before i?
            if firstpos[t] - l < i:
                state = t
                l += 1
            else:
                break
        end = i + l + 1
        if end > n:
            end = n
        if want_bounds:
            bounds[count] = end
        count += 1
        i = end
    return count, bounds[:count]


def _as_array(seq) -> np.ndarray:
    if hasattr(seq, "symbols"):
        seq = seq.symbols
    if isinstance(seq, str):
        return np.array([ord(ch) for ch in seq], dtype=np.int64)
    return np.asarray(seq, dtype=np.int64).ravel()


def _dense(arr: np.ndarray) -> tuple[np.ndarray, int]:
    alphabet, inverse = np.unique(arr, return_inverse=True)
    return inverse.astype(np.int32).ravel(), len(alphabet)


def lz76_complexity(seq, boundaries: bool = False) -> ComplexityValue:
    """Number of components in the LZ76 exhaustive history of ``seq``.

    ``seq`` may be a SymbolSequence, a string, or any integer array-like.
    Set ``boundaries`` to also return the end offset of every component.
    """
    arr = _as_array(seq)
    if arr.size == 0:
        raise EmptySequence("LZ76 complexity of an empty sequence is undefined")
    dense, sigma = _dense(arr)
    count, bounds = _lz76_kernel(dense, sigma, boundaries)
    return ComplexityValue(
        int(count), tuple(int(b) for b in bounds) if boundaries else None
    )


def conditional_complexity(x, y) -> ComplexityValue:
    """Complexity of ``y`` given the grammar of ``x``, i.e. C(x concatenated with y)."""
    xa, ya = _as_array(x), _as_array(y)
    if xa.size == 0 or ya.size == 0:
        raise EmptySequence("conditional complexity needs two non-empty sequences")
    return lz76_complexity(np.concatenate([xa, ya]))


def lz76_naive(seq) -> int:
    """Reference parse using plain substring search. Quadratic; tests only."""
    arr = _as_array(seq)
    if arr.size == 0:
        raise EmptySequence("LZ76 complexity of an empty sequence is undefined")
    # one character per symbol so str.find does the matching
    text = "".join(chr(int(v) + 0x100) for v in arr)
    n = len(text)
    count = 0
    i = 0
    while i < n:
        l = 0
        while i + l < n and text.find(text[i : i + l + 1], 0, i + l) != -1:
            l += 1
        count += 1
        i += l + 1
    return count
