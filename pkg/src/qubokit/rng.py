"""Seedable random number generation used by every stochastic component.

All randomness in qubokit flows through numpy's Philox bit generator, a
counter-based 64-bit generator whose streams are identical across platforms
and numpy releases. Independent sub-streams (one per read, thread, branch,
or iteration) are derived with ``numpy.random.SeedSequence.spawn``, so
results do not depend on scheduling or execution order.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Create a generator for the given seed (or an already-derived sequence)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Derive ``count`` independent generators from one root seed.

    Child ``k`` depends only on ``(seed, k)``, never on how many siblings
    exist or in which order they are consumed.
    """
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for a nested position, e.g. (branch seed, iteration)."""
    key: Sequence[int] = (int(seed),) + tuple(int(p) for p in path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def random_bits(rng: np.random.Generator, n: int) -> list[int]:
    """Uniform random binary assignment of length ``n``."""
    return [int(b) for b in rng.integers(0, 2, size=n)]
