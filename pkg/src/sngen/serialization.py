"""JSON forms of specifications, experiments, hypotheses and search triples.

Factor records are ``{"name", "lo", "hi", "direction"}`` objects.  An
external theory is written by its ``theory_id`` alone and resolved through
:data:`THEORIES` when read back.  Non-finite weights are written as ``null``.
"""
from __future__ import annotations

import math
from typing import Callable, Mapping, Optional

import jsonschema

from .hypothesis import (
    Direction,
    Experiment,
    ExternalTheory,
    FactorSpecification,
    Hypothesis,
    IntervalHypothesis,
    SearchTriple,
    SupportSet,
    always_false,
    always_true,
)
from .intervals import IntervalVector

_FACTOR = {
    "type": "object",
    "required": ["name", "lo", "hi"],
    "properties": {
        "name": {"type": "string"},
        "lo": {"type": "number"},
        "hi": {"type": "number"},
        "direction": {"enum": [d.value for d in Direction]},
    },
}

SPEC_SCHEMA = {
    "type": "object",
    "required": ["factors"],
    "properties": {"factors": {"type": "array", "minItems": 1, "items": _FACTOR}},
}

EXPERIMENT_SCHEMA = {
    "type": "object",
    "required": ["spec", "intervals"],
    "properties": {
        "spec": SPEC_SCHEMA,
        "intervals": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "lo", "hi"],
                "properties": {"name": {"type": "string"}, "lo": {"type": "number"}, "hi": {"type": "number"}},
            },
        },
    },
}

HYPOTHESIS_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["kind", "spec", "intervals"],
            "properties": {
                "kind": {"const": "interval"},
                "spec": SPEC_SCHEMA,
                "intervals": EXPERIMENT_SCHEMA["properties"]["intervals"],
            },
        },
        {
            "type": "object",
            "required": ["kind", "theory_id"],
            "properties": {"kind": {"const": "external"}, "theory_id": {"type": "string"}},
        },
    ]
}

TRIPLE_SCHEMA = {
    "type": "object",
    "required": ["hypothesis", "support", "weight"],
    "properties": {
        "hypothesis": HYPOTHESIS_SCHEMA,
        "support": {"type": "array", "items": {"type": "string"}},
        "weight": {"type": ["number", "null"]},
    },
}


def _krk_theory():
    from .domains.krk import KRK_THEORY

    return KRK_THEORY


THEORIES: dict[str, Callable[[], ExternalTheory]] = {
    "true": always_true,
    "false": always_false,
    "krk-wfw": _krk_theory,
}


def register_theory(theory_id: str, factory: Callable[[], ExternalTheory]) -> None:
    THEORIES[theory_id] = factory


def spec_to_json(spec: FactorSpecification) -> dict:
    return {
        "factors": [
            {"name": name, "lo": lo, "hi": hi, "direction": d.value}
            for name, (lo, hi), d in zip(spec.factors, spec.bounds, spec.directions)
        ]
    }


def spec_from_json(data: Mapping) -> FactorSpecification:
    jsonschema.validate(data, SPEC_SCHEMA)
    return FactorSpecification.from_records(data["factors"])


def _intervals_json(spec: FactorSpecification, vector: IntervalVector) -> list:
    return [{"name": n, "lo": lo, "hi": hi} for n, (lo, hi) in zip(spec.factors, vector)]


def _vector_from(spec: FactorSpecification, records) -> IntervalVector:
    by_name = {r["name"]: (r["lo"], r["hi"]) for r in records}
    if set(by_name) != set(spec.factors) or len(records) != len(spec):
        raise ValueError("experiment intervals must name each factor of the spec exactly once")
    return IntervalVector(by_name[n] for n in spec.factors)


def experiment_to_json(e: Experiment) -> dict:
    return {"spec": spec_to_json(e.spec), "intervals": _intervals_json(e.spec, e.vector)}


def experiment_from_json(data: Mapping) -> Experiment:
    jsonschema.validate(data, EXPERIMENT_SCHEMA)
    spec = spec_from_json(data["spec"])
    return Experiment(_vector_from(spec, data["intervals"]), spec)


def hypothesis_to_json(h: Hypothesis) -> dict:
    if isinstance(h, IntervalHypothesis):
        return {"kind": "interval", "spec": spec_to_json(h.spec), "intervals": _intervals_json(h.spec, h.vector)}
    if isinstance(h, ExternalTheory):
        return {"kind": "external", "theory_id": h.theory_id}
    raise TypeError(f"cannot serialise {type(h).__name__}")


def hypothesis_from_json(data: Mapping, theories: Optional[Mapping] = None) -> Hypothesis:
    jsonschema.validate(data, HYPOTHESIS_SCHEMA)
    if data["kind"] == "external":
        registry = theories if theories is not None else THEORIES
        try:
            return registry[data["theory_id"]]()
        except KeyError:
            raise ValueError(f"unknown theory {data['theory_id']!r}") from None
    spec = spec_from_json(data["spec"])
    return IntervalHypothesis(Experiment(_vector_from(spec, data["intervals"]), spec))


def triple_to_json(triple: SearchTriple, encode: Callable = str) -> dict:
    w = triple.weight
    return {
        "hypothesis": hypothesis_to_json(triple.hypothesis),
        "support": sorted(encode(x) for x in triple.support.members),
        "weight": w if math.isfinite(w) else None,
    }


def triple_from_json(data: Mapping, decode: Callable = lambda s: s, theories=None) -> SearchTriple:
    jsonschema.validate(data, TRIPLE_SCHEMA)
    h = hypothesis_from_json(data["hypothesis"], theories)
    members = frozenset(decode(s) for s in data["support"])
    w = data["weight"]
    return SearchTriple(h, SupportSet(members, h), -math.inf if w is None else float(w))
