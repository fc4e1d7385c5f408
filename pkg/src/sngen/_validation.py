"""Input checks for the estimator front end."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import column_or_1d


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_instances(X, name: str = "X") -> list:
    """Instances are arbitrary hashable objects, so only materialise and hash-check."""
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be a sequence of instances, not a single string")
    items = list(X)
    for x in items:
        try:
            hash(x)
        except TypeError:
            raise TypeError(f"{name} contains an unhashable instance: {x!r}") from None
    return items


def check_labels(y, n_samples: int) -> np.ndarray:
    y = column_or_1d(np.asarray(y), warn=True)
    if len(y) != n_samples:
        raise ValueError(f"X has {n_samples} instances but y has {len(y)} labels")
    values = set(np.unique(y).tolist())
    if not values <= {0, 1, True, False}:
        raise ValueError(f"labels must be binary (0/1 or bool), got {sorted(values)}")
    return y.astype(bool)


def check_seed(random_state) -> int:
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1)[0])
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        return int(random_state)
    raise ValueError(f"random_state must be None or an int, got {random_state!r}")
