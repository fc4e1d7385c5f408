import math

import jsonschema
import pytest

from sngen import FactorSpecification, SearchTriple, SupportSet, make_interval_hypothesis
from sngen.serialization import (
    THEORIES,
    experiment_from_json,
    experiment_to_json,
    hypothesis_from_json,
    hypothesis_to_json,
    register_theory,
    spec_from_json,
    spec_to_json,
    triple_from_json,
    triple_to_json,
)
from sngen.hypothesis import ExternalTheory

SPEC = FactorSpecification(("affinity", "molwt"), [(3, 10), (200, 700)], ("maximize", "free"))


def test_spec_round_trip():
    assert spec_from_json(spec_to_json(SPEC)) == SPEC


def test_interval_hypothesis_round_trip():
    h = make_interval_hypothesis(SPEC, [(5, 10), (250.5, 300)])
    data = hypothesis_to_json(h)
    assert data["kind"] == "interval"
    assert hypothesis_from_json(data) == h
    assert experiment_from_json(experiment_to_json(h.experiment)) == h.experiment


def test_intervals_are_matched_by_name():
    data = hypothesis_to_json(make_interval_hypothesis(SPEC, [(5, 10), (250, 300)]))
    data["intervals"].reverse()
    assert hypothesis_from_json(data).vector[0] == (5, 10)
    data["intervals"][0]["name"] = "other"
    with pytest.raises(ValueError):
        hypothesis_from_json(data)


def test_schema_violations_are_rejected():
    with pytest.raises(jsonschema.ValidationError):
        hypothesis_from_json({"kind": "interval"})
    with pytest.raises(jsonschema.ValidationError):
        spec_from_json({"factors": [{"name": "a", "lo": "x", "hi": 1}]})


def test_external_theories_by_id():
    for tid in ("true", "false", "krk-wfw"):
        assert hypothesis_from_json({"kind": "external", "theory_id": tid}).theory_id == tid
    with pytest.raises(ValueError):
        hypothesis_from_json({"kind": "external", "theory_id": "nope"})
    register_theory("odd", lambda: ExternalTheory("odd", lambda x: x % 2 == 1))
    try:
        assert hypothesis_from_json({"kind": "external", "theory_id": "odd"}).satisfies(3, None)
    finally:
        THEORIES.pop("odd")


def test_triple_round_trip_and_infinite_weight():
    h = make_interval_hypothesis(SPEC, [(5, 10), (250, 300)])
    t = SearchTriple(h, SupportSet(frozenset({"b", "a"}), h), 1.25)
    data = triple_to_json(t)
    assert data["support"] == ["a", "b"]
    back = triple_from_json(data)
    assert back.hypothesis == h and back.support.members == {"a", "b"} and back.weight == 1.25
    neg = triple_to_json(SearchTriple(h, SupportSet(frozenset(), h), -math.inf))
    assert neg["weight"] is None
    assert triple_from_json(neg).weight == -math.inf
