"""Symbolic neural generation over interval hypotheses."""
from .estimator import RejectionGenerator, SNGSearch
from .gen import GeneratorContext, GenOutcome, PromptSpec, build_prompt, run_gen
from .hypothesis import (
    Background,
    Direction,
    Experiment,
    ExternalTheory,
    FactorSpecification,
    IntervalHypothesis,
    Ordering,
    SearchTriple,
    SupportSet,
    always_false,
    always_true,
    compare_hypotheses,
    compare_triples,
    extension_on,
    make_interval_hypothesis,
    reindex,
    satisfies,
)
from .intervals import IntervalVector, contains, properly_contains
from .scoring import LabelledExamples, QConfig, estimate_extension_fraction, partition_examples, q_score
from .search import SearchConfig, Strategy, StopReason, run_genmol, sample_sub_experiments

__version__ = "0.1.0"

__all__ = [
    "RejectionGenerator",
    "SNGSearch",
    "GeneratorContext",
    "GenOutcome",
    "PromptSpec",
    "build_prompt",
    "run_gen",
    "Background",
    "Direction",
    "Experiment",
    "ExternalTheory",
    "FactorSpecification",
    "IntervalHypothesis",
    "Ordering",
    "SearchTriple",
    "SupportSet",
    "always_false",
    "always_true",
    "compare_hypotheses",
    "compare_triples",
    "extension_on",
    "make_interval_hypothesis",
    "reindex",
    "satisfies",
    "IntervalVector",
    "contains",
    "properly_contains",
    "LabelledExamples",
    "QConfig",
    "estimate_extension_fraction",
    "partition_examples",
    "q_score",
    "SearchConfig",
    "Strategy",
    "StopReason",
    "run_genmol",
    "sample_sub_experiments",
]
