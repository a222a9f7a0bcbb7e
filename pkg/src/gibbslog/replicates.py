"""Counter-based per-replicate seeding, so thread count never changes results."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

R = TypeVar("R")

DEFAULT_SEED = 20240601


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    """Generator for replicate ``rep``; depends only on ``(seed, rep)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def map_replicates(
    fn: Callable[[int, np.random.Generator], R], reps: int, seed: int, threads: int = 1
) -> list[R]:
    """``[fn(rep, rng_rep) for rep in range(reps)]``, optionally threaded, in rep order."""
    if reps < 0:
        raise ValueError("reps must be non-negative")
    if threads < 1:
        raise ValueError("threads must be at least 1")

    def one(rep: int) -> R:
        return fn(rep, replicate_rng(seed, rep))

    if threads == 1 or reps < 2:
        return [one(rep) for rep in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(reps)))
