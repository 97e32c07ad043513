"""Seed derivation.

All randomness flows through numpy's PCG64 bit generator. Child streams are
derived from a master seed with ``SeedSequence`` spawn keys, which is a
counter-based split: the stream for key ``(i, j, k)`` does not depend on how
many other streams were drawn or in which order.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput

BIT_GENERATOR = "PCG64"
GENERATOR_VERSION = f"numpy-{np.__version__}/{BIT_GENERATOR}"

Seed = int | tuple[int, ...]


def derive_seed(master: int, *key: int) -> int:
    """Collapse ``(master, key...)`` into a single 64-bit seed."""
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def make_rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, tuple):
        seed = derive_seed(seed[0], *seed[1:])
    if int(seed) < 0:
        raise InvalidInput("seed must be non-negative")
    return np.random.Generator(np.random.PCG64(int(seed)))


def entropy_seed() -> int:
    return int(np.random.SeedSequence().generate_state(2, dtype=np.uint64)[0])
