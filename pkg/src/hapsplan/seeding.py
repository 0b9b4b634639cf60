"""Deterministic seed derivation.

All randomness in the repository flows from a single 64-bit scenario seed
through NumPy's PCG64 generator. Sub-seeds (per run, per sweep grid point,
per k-means restart, ...) are derived with splitmix64 so that results are
bit-stable across platforms and independent of scheduling order.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1

# Stream tags keep unrelated consumers of the same base seed decorrelated.
TAG_LAYOUT = 1
TAG_ALLOCATION = 2
TAG_KMEANS = 3
TAG_SWEEP = 4


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixing function (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *parts: int) -> int:
    """Fold integer parts into ``base_seed``, order-sensitively.

    derive_seed(s, a, b) != derive_seed(s, b, a) in general, so positional
    indices (grid index, run index, ...) can be mixed in directly.
    """
    h = base_seed & _MASK
    for p in parts:
        h = splitmix64((h ^ splitmix64(p & _MASK)) & _MASK)
    return h


def rng_from(base_seed: int, *parts: int) -> np.random.Generator:
    """PCG64 generator seeded from a derived sub-seed."""
    return np.random.default_rng(derive_seed(base_seed, *parts))
