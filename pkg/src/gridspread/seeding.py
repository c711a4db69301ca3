"""Deterministic seed derivation for parallel Monte Carlo runs.

Every worker derives its stream from (master seed, label path), never from
scheduling order, so outputs are byte-identical at any worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _token(part) -> int:
    if isinstance(part, (int, np.integer)) and not isinstance(part, bool):
        return int(part) & _MASK64
    digest = hashlib.blake2b(repr(part).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(master_seed: int, *parts) -> np.random.SeedSequence:
    """SeedSequence keyed by the master seed and a label path.

    Labels may be ints, strings, or floats; floats are keyed by repr, so use
    the same literal everywhere.
    """
    entropy = [int(master_seed) & _MASK64] + [_token(p) for p in parts]
    return np.random.SeedSequence(entropy)


def rng_for(master_seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master_seed, *parts))


def int_seed(master_seed: int, *parts) -> int:
    """A plain 64-bit seed for APIs that take an integer seed."""
    return int(seed_sequence(master_seed, *parts).generate_state(1, np.uint64)[0])
