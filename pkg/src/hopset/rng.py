"""Seeded randomness.

Every random choice goes through a counter-based Philox generator keyed by a
64-bit run seed and the name of the component drawing from it, so replays are
exact and components never share a stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_MASK = 2**64 - 1


def derive_seed(seed: int, *names) -> int:
    """64-bit sub-seed for ``(seed, names...)``."""
    text = ":".join([str(int(seed) & SEED_MASK)] + [str(x) for x in names])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def make_rng(seed: int, *names) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(derive_seed(seed, *names)))
