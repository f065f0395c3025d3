"""Deterministic child-seed derivation.

All randomness in the package flows from explicit integer seeds. Components
that need several independent streams derive child seeds from a master seed
plus integer tags (round index, client id, ...) so results are stable across
runs and independent of scheduling.
"""

from __future__ import annotations

import zlib

import numpy as np


def _as_int(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def child_seed(master: int, *parts) -> int:
    """Derive a stable 63-bit child seed from a master seed and tags."""
    ss = np.random.SeedSequence([_as_int(master)] + [_as_int(p) for p in parts])
    words = ss.generate_state(2, dtype=np.uint32)
    return int(words[0]) | (int(words[1] & 0x7FFFFFFF) << 32)


def rng_from(master: int, *parts) -> np.random.Generator:
    """Seeded PCG64 generator for the given master seed and tags."""
    return np.random.Generator(np.random.PCG64(child_seed(master, *parts)))
