"""
Seeded random stream derivation.

Each independent source of randomness in a run (a zone's demand arrivals, a zone's
supply, a zone's rider attributes, driver arrivals, ...) owns its own
`numpy.random.Generator`, spawned from one master `SeedSequence`. Drawing more
numbers from one stream never shifts another, so adding a feature that consumes
randomness in one place leaves every other sequence of a seeded run untouched.
"""
from typing import Dict, Sequence

import numpy as np

__all__ = [
    'MAX_SEED',
    'spawn_streams',
]

MAX_SEED = 2 ** 64 - 1


def spawn_streams(seed: int, names: Sequence[str]) -> Dict[str, np.random.Generator]:
    """
    Derives one independent generator per name from a master seed.

    Streams are matched to names by position, so the order of `names` is part of
    the reproducibility contract: append new names, never reorder existing ones.

    Args:
        seed: Master seed, an unsigned 64-bit integer.
        names: Stream names, in a fixed order.

    Returns:
        Mapping from stream name to its generator.
    """
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {
        name: np.random.default_rng(child)
        for name, child in zip(names, children)
    }
