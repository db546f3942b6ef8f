"""Deterministic seed derivation.

Every stochastic routine draws from ``rng_for(seed, *keys)``. Derived seeds come
from chaining splitmix64 over the master seed and the integer keys, so a trial's
stream depends only on its coordinates and never on scheduling.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed for the substream addressed by ``keys`` under ``master``."""
    if master < 0 or master > MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    h = splitmix64(master)
    for k in keys:
        h = splitmix64(h ^ (int(k) & MASK64))
    return h


def rng_for(master: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master, *keys)))
