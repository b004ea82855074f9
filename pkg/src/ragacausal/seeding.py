"""Deterministic sub-seeds derived from a master seed and a key path."""
from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def derive_seed(master_seed: int, *path) -> np.random.SeedSequence:
    """Seed sequence for ``path`` (ints or strings) under ``master_seed``.

    Strings hash through CRC-32, never through ``hash()``, which is salted
    per interpreter run.
    """
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(_key(p) for p in path))


def derive_rng(master_seed: int, *path) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *path))
