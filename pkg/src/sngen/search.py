"""Greedy search over nested interval hypotheses.

Each step samples boxes properly inside the incumbent, scores every one with
``Q(H) * 1(w > 0)`` where ``w`` is the weight of a generation run under ``H``,
keeps the best, and stops once the best score falls below ``theta`` or below
the incumbent's.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._random import as_generator, derive_seed
from .exceptions import Exhausted, GenAborted, NegativelyInfiniteScore
from .gen import GeneratorBackend, run_gen
from .hypothesis import (
    Background,
    Direction,
    Experiment,
    FactorSpecification,
    IntervalHypothesis,
    SearchTriple,
    SupportSet,
)
from .intervals import IntervalVector
from .scoring import LabelledExamples, QConfig, estimate_extension_fraction, q_score

log = logging.getLogger(__name__)

__all__ = [
    "Strategy",
    "StopReason",
    "SearchConfig",
    "CandidateRecord",
    "StepRecord",
    "SearchTrace",
    "sample_sub_experiments",
    "combined_score",
    "run_genmol",
]


class Strategy(str, enum.Enum):
    UNIFORM_ORTHOGONAL = "uniform"
    FIXED_BOUND = "fixed"
    LATIN_HYPER_RECTANGLE = "latin"


class StopReason(str, enum.Enum):
    ROOT_REJECTED = "RootRejected"
    BELOW_THRESHOLD = "BelowThreshold"
    NO_IMPROVEMENT = "NoImprovement"
    MAX_STEPS = "MaxSteps"
    EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class SearchConfig:
    n_candidates: int = 10
    max_steps: int = 10
    gen_iterations: int = 10
    gen_samples: int = 10
    theta: float = -math.inf
    strategy: Strategy = Strategy.LATIN_HYPER_RECTANGLE
    seed: int = 0
    final_samples: int = 100
    weighted_score: bool = False
    seeded: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        for name in ("n_candidates", "max_steps", "gen_iterations", "gen_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.final_samples < 0:
            raise ValueError("final_samples must be >= 0")


# ---------------------------------------------------------------- sampling


def _open_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Uniform draw from the open interval (lo, hi)."""
    for _ in range(64):
        v = lo + (hi - lo) * rng.random()
        if lo < v < hi:
            return v
    return lo + (hi - lo) / 2.0


def _ordered_pair(rng, lo, hi):
    while True:
        a, b = sorted((_open_uniform(rng, lo, hi), _open_uniform(rng, lo, hi)))
        if a < b:
            return a, b


def _strata(rng: np.random.Generator, count: int) -> np.ndarray:
    """One point per stratum of (0, 1), randomly permuted across candidates."""
    cells = rng.permutation(count)
    out = np.empty(count)
    for j, cell in enumerate(cells):
        out[j] = _open_uniform(rng, cell / count, (cell + 1) / count)
    return out


def _scale(rng, lo: float, hi: float, u: float) -> float:
    # rounding can land lo + u*(hi - lo) on an endpoint for tiny widths
    v = lo + u * (hi - lo)
    return v if lo < v < hi else _open_uniform(rng, lo, hi)


def sample_sub_experiments(
    current: Experiment,
    count: int,
    strategy: Strategy,
    directions: Optional[Sequence[Direction]] = None,
    rng=None,
) -> list[Experiment]:
    """Draw ``count`` experiments properly contained by ``current``.

    Point intervals are carried over unchanged; every other dimension is
    shrunk strictly.  Under the fixed-bound and Latin strategies a
    ``MAXIMIZE`` hint keeps the upper endpoint and draws only the lower one,
    ``MINIMIZE`` the reverse.  The Latin strategy stratifies the drawn
    endpoint of each dimension so the ``count`` candidates occupy distinct
    strata of the interval; for a free dimension the lower endpoint is
    stratified over the interval and the upper endpoint over the remaining
    width ``(a, hi)``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    strategy = Strategy(strategy)
    vector = current.vector
    if vector.is_degenerate:
        raise Exhausted("every interval is a single point")
    rng = as_generator(rng)
    directions = tuple(Direction(d) for d in (directions or current.spec.directions))
    n_dim = len(vector)
    columns: list[list[tuple[float, float]]] = []
    for d in range(n_dim):
        lo, hi = vector[d]
        hint = directions[d]
        if lo == hi:
            columns.append([(lo, hi)] * count)
            continue
        if strategy is Strategy.UNIFORM_ORTHOGONAL or (
            strategy is Strategy.FIXED_BOUND and hint is Direction.FREE
        ):
            columns.append([_ordered_pair(rng, lo, hi) for _ in range(count)])
        elif strategy is Strategy.FIXED_BOUND:
            if hint is Direction.MAXIMIZE:
                columns.append([(_open_uniform(rng, lo, hi), hi) for _ in range(count)])
            else:
                columns.append([(lo, _open_uniform(rng, lo, hi)) for _ in range(count)])
        else:
            first = [_scale(rng, lo, hi, u) for u in _strata(rng, count)]
            if hint is Direction.MAXIMIZE:
                columns.append([(a, hi) for a in first])
            elif hint is Direction.MINIMIZE:
                columns.append([(lo, b) for b in first])
            else:
                second = _strata(rng, count)
                columns.append([(a, min(hi, a + v * (hi - a))) for a, v in zip(first, second)])
    return [
        Experiment(IntervalVector(columns[d][j] for d in range(n_dim)), current.spec)
        for j in range(count)
    ]


# ---------------------------------------------------------------- records


@dataclass(frozen=True)
class CandidateRecord:
    index: int
    experiment: Experiment
    q: float
    gen_weight: float
    score: float
    n_support: int
    support: frozenset = field(default=frozenset(), repr=False)
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "intervals": [list(iv) for iv in self.experiment.vector],
            "q": _finite_or_none(self.q),
            "gen_weight": self.gen_weight,
            "score": _finite_or_none(self.score),
            "n_support": self.n_support,
        }
        if self.error:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class StepRecord:
    step: int
    candidates: tuple[CandidateRecord, ...]
    chosen: Optional[int]
    theta_hat: Optional[float]
    accepted: bool
    stop_reason: Optional[StopReason] = None

    @property
    def chosen_candidate(self) -> Optional[CandidateRecord]:
        return None if self.chosen is None else self.candidates[self.chosen]

    def to_json(self) -> dict:
        best = self.chosen_candidate
        return {
            "step": self.step,
            "candidates": [c.to_json() for c in self.candidates],
            "chosen": None if best is None else {
                "index": best.index,
                "W": _finite_or_none(best.score),
                "intervals": [list(iv) for iv in best.experiment.vector],
                "n_support": best.n_support,
                "theta_hat": self.theta_hat,
            },
            "accepted": self.accepted,
            "stop_reason": None if self.stop_reason is None else self.stop_reason.value,
        }


@dataclass(frozen=True)
class SearchTrace:
    steps: tuple[StepRecord, ...]
    stop_reason: StopReason

    def chain(self) -> list[CandidateRecord]:
        """The accepted incumbents, root first."""
        return [s.chosen_candidate for s in self.steps if s.accepted]

    def theta_hat_chain(self) -> list[float]:
        return [s.theta_hat for s in self.steps if s.accepted]

    def to_jsonl(self) -> str:
        import json

        return "".join(json.dumps(s.to_json(), sort_keys=True) + "\n" for s in self.steps)


def _finite_or_none(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------- search


def combined_score(q: float, gen_weight: float, weighted: bool = False) -> float:
    """``q * 1(w > 0)`` (or ``q * w`` when ``weighted``); an infinite ``q`` stays -inf."""
    if q == -math.inf:
        return -math.inf
    return q * gen_weight if weighted else (q if gen_weight > 0 else 0.0)


def _evaluate(index, experiment, seed, backend, examples, background, cfg, qcfg, seeds):
    h = IntervalHypothesis(experiment)
    try:
        q = q_score(h, examples, qcfg, background)
    except NegativelyInfiniteScore:
        q = -math.inf
    try:
        out = run_gen(backend, seeds, background, h, cfg.gen_iterations, cfg.gen_samples, seed)
    except GenAborted as exc:
        return CandidateRecord(index, experiment, q, 0.0, -math.inf, 0, frozenset(), str(exc))
    score = combined_score(q, out.weight, cfg.weighted_score)
    return CandidateRecord(index, experiment, q, out.weight, score, len(out.accepted), out.accepted.members)


def run_genmol(
    backend: GeneratorBackend,
    examples: LabelledExamples,
    background: Background,
    spec: FactorSpecification,
    cfg: SearchConfig,
    qcfg: QConfig,
) -> tuple[SearchTriple, SearchTrace]:
    """Greedy general-to-specific search; returns the incumbent triple and the trace."""
    background.check_covers(spec)
    if not qcfg.unlabelled:
        raise ValueError("the unlabelled sample is empty")
    seeds = sorted(examples.positives, key=background.encode) if cfg.seeded else []
    rng = np.random.default_rng(derive_seed(cfg.seed, 0))

    def evaluate(step, pairs):
        args = (backend, examples, background, cfg, qcfg, seeds)
        jobs = [(j, e, derive_seed(cfg.seed, 1, step, j)) for j, e in pairs]
        if cfg.n_jobs > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
                return list(pool.map(lambda job: _evaluate(*job, *args), jobs))
        return [_evaluate(*job, *args) for job in jobs]

    root_exp = Experiment(spec.bounds, spec)
    (root,) = evaluate(0, [(0, root_exp)])
    root_h = IntervalHypothesis(root_exp)
    root_theta = estimate_extension_fraction(root_h, qcfg, background)
    steps: list[StepRecord] = []
    incumbent = root
    if root.score < cfg.theta or root.gen_weight == 0:
        steps.append(StepRecord(0, (root,), 0, root_theta, True, StopReason.ROOT_REJECTED))
        triple = SearchTriple(root_h, SupportSet(root.support, root_h), root.score)
        return triple, SearchTrace(tuple(steps), StopReason.ROOT_REJECTED)
    steps.append(StepRecord(0, (root,), 0, root_theta, True))

    stop = StopReason.MAX_STEPS
    for i in range(1, cfg.max_steps + 1):
        try:
            pool = sample_sub_experiments(incumbent.experiment, cfg.n_candidates, cfg.strategy, spec.directions, rng)
        except Exhausted:
            stop = StopReason.EXHAUSTED
            break
        records = evaluate(i, list(enumerate(pool)))
        best = max(range(len(records)), key=lambda j: (records[j].score, -j))
        chosen = records[best]
        h = IntervalHypothesis(chosen.experiment)
        theta_hat = estimate_extension_fraction(h, qcfg, background)
        if chosen.score < cfg.theta:
            stop = StopReason.BELOW_THRESHOLD
        elif chosen.score < incumbent.score:
            stop = StopReason.NO_IMPROVEMENT
        else:
            steps.append(StepRecord(i, tuple(records), best, theta_hat, True))
            incumbent = chosen
            continue
        steps.append(StepRecord(i, tuple(records), best, theta_hat, False, stop))
        break
    else:
        stop = StopReason.MAX_STEPS

    h_best = IntervalHypothesis(incumbent.experiment)
    members = set(incumbent.support)
    if cfg.final_samples > 0:
        try:
            final = run_gen(backend, seeds, background, h_best, 1, cfg.final_samples, derive_seed(cfg.seed, 2))
            members |= final.accepted.members
        except GenAborted as exc:
            log.warning("final generation run aborted, keeping the incumbent support: %s", exc)
    triple = SearchTriple(h_best, SupportSet(frozenset(members), h_best), incumbent.score)
    return triple, SearchTrace(tuple(steps), stop)
