"""Counter-based random streams.

Every random draw in the package goes through :func:`make_rng`, which builds a
Philox generator keyed by ``(seed, index)``. Replicate ``i`` of a Monte Carlo run
with master seed ``s`` uses ``make_rng(s, i)``, so results do not depend on how
replicates are scheduled across workers.
"""
from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "as_generator"]


def make_rng(seed: int, index: int | None = None) -> np.random.Generator:
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    if index is not None:
        key.append(int(index))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, an ``(seed, index)`` pair or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        return make_rng(*seed)
    return make_rng(seed)
