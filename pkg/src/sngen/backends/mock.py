from __future__ import annotations

from typing import Sequence

import numpy as np

from ..gen import GeneratorContext


def mock_uniform_sample(universe: Sequence[str], s: int, seed) -> list[str]:
    """``s`` independent uniform draws with replacement from ``universe``."""
    if len(universe) == 0:
        raise ValueError("cannot sample from an empty universe")
    rng = np.random.default_rng(seed)
    return [universe[i] for i in rng.integers(0, len(universe), size=s)]


class MockUniformBackend:
    """Ignores the context and draws uniformly from a fixed list of encodings."""

    def __init__(self, universe: Sequence[str]):
        if len(universe) == 0:
            raise ValueError("cannot sample from an empty universe")
        self.universe = tuple(universe)

    def sample(self, context: GeneratorContext, count: int, seed: int) -> list[str]:
        return mock_uniform_sample(self.universe, count, seed)
