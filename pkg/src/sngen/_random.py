import numpy as np


def derive_seed(seed, *keys) -> int:
    """Deterministic 32-bit sub-seed for ``keys`` under a root ``seed``."""
    spawn_key = tuple(int(k) for k in keys)
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=spawn_key)
    return int(ss.generate_state(1)[0])


def as_generator(random_state) -> np.random.Generator:
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)
