"""Factor specifications, hypotheses, extensions and the (H, X, W) order.

Extensions are only materialised on finite carriers; over the whole universe a
hypothesis is represented intensionally by :func:`satisfies`.
"""
from __future__ import annotations

import enum
import functools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .exceptions import ArityError, ContainmentError, FactorUndefined, UnknownFactorError
from .intervals import IntervalVector, contains

__all__ = [
    "Direction",
    "FactorSpecification",
    "Experiment",
    "Hypothesis",
    "IntervalHypothesis",
    "ExternalTheory",
    "Background",
    "SupportSet",
    "SearchTriple",
    "Ordering",
    "make_interval_hypothesis",
    "always_true",
    "always_false",
    "satisfies",
    "extension_on",
    "compare_hypotheses",
    "reindex",
    "compare_triples",
]

Instance = Hashable


class Direction(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"
    FREE = "free"


@dataclass(frozen=True)
class FactorSpecification:
    """Named factors, their outer bounds and an optional optimisation hint each."""

    factors: tuple[str, ...]
    bounds: IntervalVector
    directions: tuple[Direction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not isinstance(self.bounds, IntervalVector):
            object.__setattr__(self, "bounds", IntervalVector(self.bounds))
        if len(self.factors) != len(self.bounds):
            raise ArityError(
                f"{len(self.factors)} factors but bounds have arity {len(self.bounds)}"
            )
        if len(set(self.factors)) != len(self.factors):
            raise ValueError(f"factor names must be unique: {self.factors}")
        directions = tuple(Direction(d) for d in self.directions) or (
            (Direction.FREE,) * len(self.factors)
        )
        if len(directions) != len(self.factors):
            raise ArityError("one direction per factor is required")
        object.__setattr__(self, "directions", directions)

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, Any]]) -> "FactorSpecification":
        records = list(records)
        return cls(
            factors=tuple(r["name"] for r in records),
            bounds=IntervalVector((r["lo"], r["hi"]) for r in records),
            directions=tuple(Direction(r.get("direction", "free")) for r in records),
        )

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class Experiment:
    """An interval-vector contained by the bounds of ``spec``."""

    vector: IntervalVector
    spec: FactorSpecification

    def __post_init__(self):
        if not isinstance(self.vector, IntervalVector):
            object.__setattr__(self, "vector", IntervalVector(self.vector))
        if len(self.vector) != len(self.spec):
            raise ArityError(
                f"experiment has arity {len(self.vector)}, spec has {len(self.spec)}"
            )
        if not contains(self.spec.bounds, self.vector):
            raise ContainmentError(f"{self.vector!r} is not contained by {self.spec.bounds!r}")


class Hypothesis(ABC):
    """Anything with a total, deterministic membership test over instances."""

    @abstractmethod
    def satisfies(self, x: Instance, background: "Background") -> bool:
        ...

    @abstractmethod
    def describe(self) -> str:
        """Human-readable form, used as generator conditioning text."""


@dataclass(frozen=True)
class IntervalHypothesis(Hypothesis):
    """``Sigma(x) <- f_1(x) in i_1 and ... and f_n(x) in i_n``."""

    experiment: Experiment

    @property
    def spec(self) -> FactorSpecification:
        return self.experiment.spec

    @property
    def vector(self) -> IntervalVector:
        return self.experiment.vector

    def satisfies(self, x, background):
        for name, (lo, hi) in zip(self.spec.factors, self.vector):
            value = background.factor_value(name, x)
            if value is None or not lo <= value <= hi:
                return False
        return True

    def describe(self):
        terms = [f"{name}(x) in [{lo:g}, {hi:g}]" for name, (lo, hi) in zip(self.spec.factors, self.vector)]
        return "Sigma(x) <- " + " and ".join(terms)


@dataclass(frozen=True, eq=False)
class ExternalTheory(Hypothesis):
    """A hypothesis whose membership test is supplied by a domain evaluator.

    Identity (equality, hashing, serialisation) is by ``theory_id`` only.
    """

    theory_id: str
    predicate: Callable[[Instance], bool] = field(repr=False)
    description: str = ""

    def satisfies(self, x, background):
        try:
            return bool(self.predicate(x))
        except FactorUndefined:
            return False

    def describe(self):
        return self.description or self.theory_id

    def __eq__(self, other):
        return isinstance(other, ExternalTheory) and other.theory_id == self.theory_id

    def __hash__(self):
        return hash(("ExternalTheory", self.theory_id))


def make_interval_hypothesis(spec: FactorSpecification, vector) -> IntervalHypothesis:
    """Build the hypothesis for an experiment; raises ContainmentError outside the bounds."""
    return IntervalHypothesis(Experiment(vector if isinstance(vector, IntervalVector) else IntervalVector(vector), spec))


def always_true() -> ExternalTheory:
    return ExternalTheory("true", lambda x: True, "every instance")


def always_false() -> ExternalTheory:
    return ExternalTheory("false", lambda x: False, "no instance")


def _memoize(fn):
    cached = functools.lru_cache(maxsize=None)(fn)
    if hasattr(fn, "prefetch"):
        cached.prefetch = fn.prefetch
    return cached


@dataclass
class Background:
    """Factor functions plus the universe codec for one domain.

    ``factors`` maps a factor name to ``f(instance) -> float``.  A function
    signals an undefined value by raising :class:`FactorUndefined` or
    returning ``None``/NaN.  ``decode`` turns a wire encoding into an instance
    (``None`` when the encoding is outside the universe) and ``encode`` is its
    inverse.  ``universe`` is an optional finite enumeration of encodings.
    """

    factors: Mapping[str, Callable[[Instance], Optional[float]]] = field(default_factory=dict)
    decode: Callable[[str], Optional[Instance]] = lambda text: text
    encode: Callable[[Instance], str] = str
    universe: Optional[Sequence[str]] = None
    memoize: bool = True

    def __post_init__(self):
        factors = dict(self.factors)
        if self.memoize:
            factors = {name: _memoize(fn) for name, fn in factors.items()}
        self.factors = factors

    def factor_value(self, name: str, x: Instance) -> Optional[float]:
        try:
            fn = self.factors[name]
        except KeyError:
            raise UnknownFactorError(name) from None
        try:
            value = fn(x)
        except FactorUndefined:
            return None
        if value is None:
            return None
        value = float(value)
        return None if math.isnan(value) else value

    def prefetch(self, instances: Sequence[Instance]) -> None:
        """Let batch-capable factor functions (external adapters) warm their caches."""
        for fn in self.factors.values():
            hook = getattr(fn, "prefetch", None)
            if hook is not None:
                hook(instances)

    def check_covers(self, spec: FactorSpecification) -> None:
        missing = [name for name in spec.factors if name not in self.factors]
        if missing:
            raise UnknownFactorError(", ".join(missing))


def satisfies(h: Hypothesis, x: Instance, background: Background) -> bool:
    """Non-vacuous membership: an undefined factor value means ``False``."""
    return h.satisfies(x, background)


def extension_on(h: Hypothesis, sample: Iterable[Instance], background: Background) -> frozenset:
    return frozenset(x for x in sample if h.satisfies(x, background))


class Ordering(enum.Enum):
    GREATER_EQ = "GreaterEq"
    LESS_EQ = "LessEq"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def _order_sets(a: frozenset, b: frozenset) -> Ordering:
    if a == b:
        return Ordering.EQUAL
    if a >= b:
        return Ordering.GREATER_EQ
    if a <= b:
        return Ordering.LESS_EQ
    return Ordering.INCOMPARABLE


def compare_hypotheses(h1: Hypothesis, h2: Hypothesis, carrier: Iterable[Instance], background: Background) -> Ordering:
    """Order two hypotheses by inclusion of their extensions on a finite carrier."""
    carrier = list(carrier)
    return _order_sets(extension_on(h1, carrier, background), extension_on(h2, carrier, background))


@dataclass(frozen=True)
class SupportSet:
    """Verified instances generated under ``source``."""

    members: frozenset
    source: Hypothesis

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))

    @classmethod
    def verified(cls, members: Iterable[Instance], source: Hypothesis, background: Background) -> "SupportSet":
        members = frozenset(members)
        bad = [x for x in members if not source.satisfies(x, background)]
        if bad:
            raise ValueError(f"{len(bad)} member(s) do not satisfy {source.describe()}")
        return cls(members, source)

    def check(self, background: Background) -> bool:
        return all(self.source.satisfies(x, background) for x in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def reindex(x: SupportSet, h_lower: Hypothesis, background: Background) -> SupportSet:
    """Restriction map: keep the members that also lie in ``ext(h_lower)``."""
    return SupportSet(frozenset(m for m in x.members if h_lower.satisfies(m, background)), h_lower)


@dataclass(frozen=True)
class SearchTriple:
    hypothesis: Hypothesis
    support: SupportSet
    weight: float

    def __post_init__(self):
        if self.support.source != self.hypothesis:
            raise ValueError("support set was generated under a different hypothesis")


def compare_triples(a: SearchTriple, b: SearchTriple, carrier: Iterable[Instance], background: Background) -> Ordering:
    """Componentwise order on (hypothesis, support); weights are ignored."""
    hyp = compare_hypotheses(a.hypothesis, b.hypothesis, carrier, background)
    sup = _order_sets(a.support.members, b.support.members)
    if hyp is Ordering.EQUAL:
        return sup
    if sup is Ordering.EQUAL:
        return hyp
    if hyp is sup and hyp is not Ordering.INCOMPARABLE:
        return hyp
    return Ordering.INCOMPARABLE
