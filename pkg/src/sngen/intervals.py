"""Axis-parallel hyper-rectangles and their containment order."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exceptions import ArityError

__all__ = ["IntervalVector", "contains", "properly_contains"]


def _as_pair(item) -> tuple[float, float]:
    lo, hi = item
    lo, hi = float(lo), float(hi)
    if math.isnan(lo) or math.isnan(hi):
        raise ValueError("interval endpoints must not be NaN")
    if lo > hi:
        raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
    return lo, hi


@dataclass(frozen=True)
class IntervalVector:
    """An n-dimensional box ``([lo_1, hi_1], ..., [lo_n, hi_n])``.

    Intervals are closed at both ends.  The value is immutable and hashable,
    so it can key dictionaries and be shared between threads.
    """

    intervals: tuple[tuple[float, float], ...]

    def __init__(self, intervals: Iterable[Sequence[float]]):
        pairs = tuple(_as_pair(item) for item in intervals)
        if not pairs:
            raise ValueError("an interval-vector needs at least one dimension")
        object.__setattr__(self, "intervals", pairs)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i: int) -> tuple[float, float]:
        return self.intervals[i]

    def __iter__(self):
        return iter(self.intervals)

    def __repr__(self) -> str:
        body = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals)
        return f"IntervalVector({body})"

    @property
    def lows(self) -> tuple[float, ...]:
        return tuple(lo for lo, _ in self.intervals)

    @property
    def highs(self) -> tuple[float, ...]:
        return tuple(hi for _, hi in self.intervals)

    @property
    def is_degenerate(self) -> bool:
        """True when every interval is a single point."""
        return all(lo == hi for lo, hi in self.intervals)

    def contains_point(self, values: Sequence[float]) -> bool:
        if len(values) != len(self):
            raise ArityError(f"point has {len(values)} coordinates, box has {len(self)}")
        return all(lo <= v <= hi for (lo, hi), v in zip(self.intervals, values))

    def replace(self, i: int, interval: Sequence[float]) -> "IntervalVector":
        pairs = list(self.intervals)
        pairs[i] = interval
        return IntervalVector(pairs)


def _check_arity(a: IntervalVector, b: IntervalVector) -> None:
    if len(a) != len(b):
        raise ArityError(f"arity mismatch: {len(a)} vs {len(b)}")


def contains(outer: IntervalVector, inner: IntervalVector) -> bool:
    """True iff every interval of ``inner`` lies inside the matching one of ``outer``."""
    _check_arity(outer, inner)
    return all(
        olo <= ilo and ihi <= ohi
        for (olo, ohi), (ilo, ihi) in zip(outer.intervals, inner.intervals)
    )


def properly_contains(outer: IntervalVector, inner: IntervalVector) -> bool:
    """Containment with at least one strictly smaller interval."""
    if not contains(outer, inner):
        return False
    return any(o != i for o, i in zip(outer.intervals, inner.intervals))
