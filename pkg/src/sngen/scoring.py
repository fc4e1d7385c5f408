"""Bayesian Q-heuristic for hypotheses scored on positive, negative and unlabelled data.

All logarithms are natural.  A score of minus infinity is signalled by
raising :class:`NegativelyInfiniteScore`; use :func:`q_score_or_neginf` when a
float is more convenient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .exceptions import NegativelyInfiniteScore
from .hypothesis import Background, Hypothesis, extension_on

__all__ = [
    "LabelledExamples",
    "QConfig",
    "Partition",
    "estimate_extension_fraction",
    "partition_examples",
    "q_score",
    "q_score_or_neginf",
]


@dataclass(frozen=True)
class LabelledExamples:
    positives: frozenset
    negatives: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "positives", frozenset(self.positives))
        object.__setattr__(self, "negatives", frozenset(self.negatives))
        overlap = self.positives & self.negatives
        if overlap:
            raise ValueError(f"{len(overlap)} instance(s) labelled both positive and negative")

    @property
    def all(self) -> frozenset:
        return self.positives | self.negatives


@dataclass(frozen=True)
class QConfig:
    """Noise level, prior hook and the unlabelled sample used to estimate theta.

    The sample is fixed for a whole search, so sibling candidates are scored
    against the same carrier.
    """

    epsilon: float = 0.0
    log_prior: Optional[Callable[[Hypothesis], float]] = None
    unlabelled: tuple = field(default=())

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        object.__setattr__(self, "unlabelled", tuple(self.unlabelled))

    def prior(self, h: Hypothesis) -> float:
        return 0.0 if self.log_prior is None else float(self.log_prior(h))


class Partition(NamedTuple):
    tp: frozenset
    tn: frozenset
    fpn: frozenset


def estimate_extension_fraction(h: Hypothesis, cfg: QConfig, background: Background) -> float:
    """Fraction of the unlabelled sample inside ``ext(h)``."""
    if not cfg.unlabelled:
        raise ValueError("the unlabelled sample is empty")
    return len(extension_on(h, cfg.unlabelled, background)) / len(cfg.unlabelled)


def partition_examples(h: Hypothesis, ex: LabelledExamples, background: Background) -> Partition:
    tp = frozenset(e for e in ex.positives if h.satisfies(e, background))
    tn = frozenset(e for e in ex.negatives if not h.satisfies(e, background))
    return Partition(tp, tn, ex.all - tp - tn)


def _term(count: int, ratio_num: float, ratio_den: float, eps: float) -> float:
    # count * log((1 - eps) / den + eps); a zero count never needs the term
    if count == 0:
        return 0.0
    if ratio_den == 0.0:
        raise NegativelyInfiniteScore("extension fraction makes a required term undefined")
    return count * math.log(ratio_num / ratio_den + eps)


def q_score(
    h: Hypothesis,
    ex: LabelledExamples,
    cfg: QConfig,
    background: Background,
    theta_hat: Optional[float] = None,
) -> float:
    """``log P(H) + |TP| log((1-e)/t + e) + |TN| log((1-e)/(1-t) + e) + |FPN| log e``.

    ``theta_hat`` defaults to :func:`estimate_extension_fraction`.
    """
    if theta_hat is None:
        theta_hat = estimate_extension_fraction(h, cfg, background)
    part = partition_examples(h, ex, background)
    eps = cfg.epsilon
    if part.fpn and eps == 0.0:
        raise NegativelyInfiniteScore("misclassified examples under a noise-free model")
    score = cfg.prior(h)
    score += _term(len(part.tp), 1.0 - eps, theta_hat, eps)
    score += _term(len(part.tn), 1.0 - eps, 1.0 - theta_hat, eps)
    if part.fpn:
        score += len(part.fpn) * math.log(eps)
    return score


def q_score_or_neginf(h, ex, cfg, background, theta_hat=None) -> float:
    try:
        return q_score(h, ex, cfg, background, theta_hat)
    except NegativelyInfiniteScore:
        return -math.inf
