"""
Random stream handling.

Every Monte Carlo trial owns a generator derived from the master seed and
its position in the sweep, never from scheduling order, so results do not
depend on how many workers run them.
"""

from typing import Union

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

SeedLike = Union[int, np.integer]


def trial_rng(master_seed: SeedLike, *indices: int) -> np.random.Generator:
    """Generator for one trial, keyed by (master_seed, *indices)."""
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF, *(int(i) for i in indices)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def splitmix64(seeds: np.ndarray, count: int, offset: int = 0) -> np.ndarray:
    """
    Counter-based SplitMix64 outputs.

    Row i holds outputs ``offset+1 .. offset+count`` of the generator
    seeded with ``seeds[i]``. Shared by the transmitter and receiver
    models: a terminal's coefficients depend only on its seed.
    """
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1, 1)
    counters = np.arange(offset + 1, offset + count + 1, dtype=np.uint64).reshape(1, -1)
    with np.errstate(over="ignore"):
        z = seeds + counters * _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def uniform_from_bits(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to floats in [0, 1) using the top 53 bits."""
    return (np.asarray(words, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) / float(1 << 53)
