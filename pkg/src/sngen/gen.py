"""Rejection sampling from a pluggable generator with feedback of verified labels."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Protocol, runtime_checkable

from ._random import derive_seed
from .exceptions import BackendError, GenAborted
from .hypothesis import Background, Hypothesis, SupportSet

__all__ = [
    "GeneratorContext",
    "GeneratorBackend",
    "IterationRecord",
    "GenOutcome",
    "PromptSpec",
    "build_prompt",
    "run_gen",
]

log = logging.getLogger(__name__)


@dataclass
class GeneratorContext:
    """Conditioning information handed to a backend on every draw.

    ``history`` is append-only: each verified candidate is recorded as
    ``(label, encoding)`` in draw order.
    """

    hypothesis_description: str
    seed_examples: tuple[str, ...] = ()
    history: list[tuple[bool, str]] = field(default_factory=list)

    def record(self, label: bool, encoding: str) -> None:
        self.history.append((bool(label), encoding))

    @property
    def feasible(self) -> list[str]:
        seen = {}
        for label, enc in self.history:
            if label:
                seen.setdefault(enc, None)
        return list(seen)


@runtime_checkable
class GeneratorBackend(Protocol):
    def sample(self, context: GeneratorContext, count: int, seed: int) -> list[str]:
        """Return at most ``count`` candidate encodings."""


@dataclass(frozen=True)
class PromptSpec:
    system: str
    user: str


def build_prompt(context: GeneratorContext, s: int) -> PromptSpec:
    """Generic prompt: hypothesis, seed examples, then the labelled history.

    Domains with a fixed prompt wording (see ``sngen.backends.prompts``)
    supply their own template instead.
    """
    system = (
        "You generate instances of a concept. Reply with a comma-separated list "
        "inside square brackets and nothing else."
    )
    lines = [f"Concept: {context.hypothesis_description}"]
    if context.seed_examples:
        lines.append("Known instances:")
        lines.extend(f"true: {x}" for x in context.seed_examples)
    if context.history:
        lines.append("Previously checked:")
        lines.extend(f"{'true' if label else 'false'}: {x}" for label, x in context.history)
    lines.append(f"Generate up to {s} new instances x that complete the sentence true: x")
    return PromptSpec(system, "\n".join(lines))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    drawn: int
    verified_true: int
    rejected: int
    accepted_new: int
    accepted_total: int
    weight_running: float

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "drawn": self.drawn,
            "accepted_new": self.accepted_new,
            "accepted_total": self.accepted_total,
            "rejected": self.rejected,
            "weight_running": self.weight_running,
        }


@dataclass(frozen=True)
class GenOutcome:
    weight: float
    accepted: SupportSet
    trace: tuple[IterationRecord, ...]
    snapshots: tuple[frozenset, ...] = ()
    n: int = 0
    s: int = 0


def run_gen(
    backend: GeneratorBackend,
    examples: Iterable,
    background: Background,
    hypothesis: Hypothesis,
    n: int,
    s: int,
    seed: int = 0,
) -> GenOutcome:
    """Run ``n`` rounds of draw-verify-feedback with budget ``s`` per round.

    The weight is ``|M_n| / (s * n)``: the denominator counts the whole budget,
    so duplicates, rejects and short draws all lower it.  Encodings that do
    not decode to an instance are labelled false and kept in the context.
    A :class:`BackendError` aborts the run with the completed iterations
    attached to the raised :class:`GenAborted`.
    """
    if n < 1 or s < 1:
        raise ValueError(f"n and s must be >= 1 (got n={n}, s={s})")
    context = GeneratorContext(
        hypothesis.describe(), tuple(background.encode(x) for x in examples)
    )
    accepted: set = set()
    trace: list[IterationRecord] = []
    snapshots: list[frozenset] = []

    def outcome(iterations):
        return GenOutcome(
            len(accepted) / (s * n), SupportSet(frozenset(accepted), hypothesis),
            tuple(trace), tuple(snapshots), iterations, s,
        )

    for i in range(1, n + 1):
        try:
            drawn = list(backend.sample(context, s, derive_seed(seed, i)))
        except BackendError as exc:
            raise GenAborted(f"backend failed on iteration {i}: {exc}", outcome(i - 1)) from exc
        if len(drawn) > s:
            log.warning("backend returned %d candidates for a budget of %d; truncating", len(drawn), s)
            drawn = drawn[:s]
        instances = [background.decode(enc) for enc in drawn]
        background.prefetch([x for x in instances if x is not None])
        before = len(accepted)
        n_true = 0
        for enc, x in zip(drawn, instances):
            label = x is not None and hypothesis.satisfies(x, background)
            context.record(label, enc)
            if label:
                n_true += 1
                accepted.add(x)
        snapshots.append(frozenset(accepted))
        trace.append(
            IterationRecord(
                iteration=i,
                drawn=len(drawn),
                verified_true=n_true,
                rejected=len(drawn) - n_true,
                accepted_new=len(accepted) - before,
                accepted_total=len(accepted),
                weight_running=len(accepted) / (s * i),
            )
        )
    return outcome(n)
