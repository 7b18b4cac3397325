"""Counter-based random streams so every trial is independent of run order."""

import numpy as np


def trial_rng(seed: int, index: int = 0, *extra: int) -> np.random.Generator:
    """Generator for trial ``index`` of a run seeded with ``seed``."""
    if seed is None:
        raise ValueError("an explicit seed is required")
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, int(index), *map(int, extra)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
