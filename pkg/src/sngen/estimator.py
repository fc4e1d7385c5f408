"""Estimator front end: fit a hypothesis from labelled instances, then generate."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._random import derive_seed
from ._validation import check_instances, check_labels, check_positive_int, check_seed
from .gen import run_gen
from .hypothesis import Background, FactorSpecification, Hypothesis
from .scoring import LabelledExamples, QConfig
from .search import SearchConfig, Strategy, run_genmol

__all__ = ["SNGSearch", "RejectionGenerator"]


class SNGSearch(ClassifierMixin, BaseEstimator):
    """Search nested interval hypotheses and keep the verified generations.

    ``fit`` takes instances with binary labels (1 = positive) plus an
    unlabelled sample used to estimate how general each hypothesis is.  After
    fitting, ``hypothesis_``, ``support_`` and ``weight_`` hold the returned
    triple and ``trace_`` the per-step search record.  ``predict`` applies
    the fitted hypothesis as a membership test.

    Parameters
    ----------
    background : Background
        Factor functions and the instance codec.
    backend : GeneratorBackend
        Source of candidate encodings.
    spec : FactorSpecification
        Factors and outer bounds; the search starts from these bounds.
    n_candidates, max_steps : int
        Candidate boxes per step and the step limit.
    gen_iterations, gen_samples : int
        Budget of each generation run used to score a candidate.
    theta : float
        Minimum acceptable combined score.
    strategy : {"uniform", "fixed", "latin"}
        Sub-box sampler.
    epsilon : float
        Label-noise probability in the Q-score.
    final_samples : int
        Size of the extra generation run under the winning hypothesis.
    """

    def __init__(
        self,
        background: Background = None,
        backend=None,
        spec: FactorSpecification = None,
        n_candidates: int = 10,
        max_steps: int = 10,
        gen_iterations: int = 10,
        gen_samples: int = 10,
        theta: float = float("-inf"),
        strategy: str = "latin",
        epsilon: float = 0.0,
        log_prior=None,
        final_samples: int = 100,
        weighted_score: bool = False,
        seeded: bool = True,
        n_jobs: int = 1,
        random_state=None,
    ):
        self.background = background
        self.backend = backend
        self.spec = spec
        self.n_candidates = n_candidates
        self.max_steps = max_steps
        self.gen_iterations = gen_iterations
        self.gen_samples = gen_samples
        self.theta = theta
        self.strategy = strategy
        self.epsilon = epsilon
        self.log_prior = log_prior
        self.final_samples = final_samples
        self.weighted_score = weighted_score
        self.seeded = seeded
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _search_config(self, seed: int) -> SearchConfig:
        return SearchConfig(
            n_candidates=check_positive_int(self.n_candidates, "n_candidates"),
            max_steps=check_positive_int(self.max_steps, "max_steps"),
            gen_iterations=check_positive_int(self.gen_iterations, "gen_iterations"),
            gen_samples=check_positive_int(self.gen_samples, "gen_samples"),
            theta=float(self.theta),
            strategy=Strategy(self.strategy),
            seed=seed,
            final_samples=check_positive_int(self.final_samples, "final_samples", minimum=0),
            weighted_score=bool(self.weighted_score),
            seeded=bool(self.seeded),
            n_jobs=check_positive_int(self.n_jobs, "n_jobs"),
        )

    def fit(self, X, y, unlabelled=None):
        if self.background is None or self.backend is None or self.spec is None:
            raise ValueError("background, backend and spec are required")
        X = check_instances(X)
        y = check_labels(y, len(X))
        if unlabelled is None:
            if self.background.universe is None:
                raise ValueError("pass an unlabelled sample or use a background with a universe")
            unlabelled = [self.background.decode(e) for e in self.background.universe]
        unlabelled = check_instances(unlabelled, "unlabelled")
        if not unlabelled:
            raise ValueError("the unlabelled sample is empty")
        seed = check_seed(self.random_state)
        examples = LabelledExamples(
            frozenset(x for x, label in zip(X, y) if label),
            frozenset(x for x, label in zip(X, y) if not label),
        )
        qcfg = QConfig(epsilon=float(self.epsilon), log_prior=self.log_prior, unlabelled=tuple(unlabelled))
        triple, trace = run_genmol(
            self.backend, examples, self.background, self.spec, self._search_config(seed), qcfg
        )
        self.triple_ = triple
        self.hypothesis_ = triple.hypothesis
        self.support_ = triple.support
        self.weight_ = triple.weight
        self.trace_ = trace
        self.stop_reason_ = trace.stop_reason
        self.classes_ = np.array([0, 1])
        self.seed_ = seed
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "hypothesis_")
        X = check_instances(X)
        return np.array([int(self.hypothesis_.satisfies(x, self.background)) for x in X], dtype=int)

    def generate(self, n_samples: int = 100, n_iterations: int = 1, random_state=None) -> list:
        """Draw fresh verified instances under the fitted hypothesis."""
        check_is_fitted(self, "hypothesis_")
        seed = derive_seed(self.seed_ if random_state is None else check_seed(random_state), 3)
        out = run_gen(
            self.backend, [], self.background, self.hypothesis_,
            check_positive_int(n_iterations, "n_iterations"), check_positive_int(n_samples, "n_samples"), seed,
        )
        return sorted(out.accepted.members, key=self.background.encode)


class RejectionGenerator(BaseEstimator):
    """One draw-verify-feedback run under a fixed hypothesis.

    ``fit(X)`` uses ``X`` (possibly empty) as the seed examples; the outcome
    is exposed as ``weight_``, ``support_`` and ``trace_``.
    """

    def __init__(self, hypothesis: Hypothesis = None, background: Background = None, backend=None,
                 n_iterations: int = 5, n_samples: int = 30, random_state=None):
        self.hypothesis = hypothesis
        self.background = background
        self.backend = backend
        self.n_iterations = n_iterations
        self.n_samples = n_samples
        self.random_state = random_state

    def fit(self, X=(), y=None):
        if self.hypothesis is None or self.background is None or self.backend is None:
            raise ValueError("hypothesis, background and backend are required")
        X = check_instances(X)
        out = run_gen(
            self.backend, X, self.background, self.hypothesis,
            check_positive_int(self.n_iterations, "n_iterations"),
            check_positive_int(self.n_samples, "n_samples"),
            check_seed(self.random_state),
        )
        self.outcome_ = out
        self.weight_ = out.weight
        self.support_ = out.accepted
        self.trace_ = out.trace
        return self

    def predict(self, X) -> np.ndarray:
        X = check_instances(X)
        return np.array([int(self.hypothesis.satisfies(x, self.background)) for x in X], dtype=int)
