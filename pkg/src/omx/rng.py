"""Seeded random streams.

Every source of randomness in the package flows through a Generator
created here; there is no global RNG state. PCG64 guarantees that equal
seeds give identical sequences across runs and platforms.
"""

import numpy as np


def stream(seed):
    """Return a Generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.uint64(seed)))


def substream(seed, *key):
    """Derive an independent Generator from (seed, key...).

    Used for per-tree / per-component streams so that parallel workers
    produce the same result regardless of scheduling.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)]))
    )
