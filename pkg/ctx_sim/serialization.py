"""JSON codecs for scenarios, models, procedures, games, predicates and queries.

Decoders raise FormatError for malformed documents and let the validating
constructors raise their own errors for well-formed but invalid data.
Scenario references may be inline objects, "zero", "dice(n)", or a path
relative to the referring file.
"""

import json
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .contextuality import HierarchyReport, LocalSection
from .empirical import AnyModel, EmpiricalModel, PossibilisticModel, make_empirical_model, make_possibilistic_model
from .errors import FormatError
from .games import (
    Experiment,
    PossibilisticPredicate,
    Unsatisfiable,
    game_from_components,
    make_experiment,
    make_predicate,
    payoff_experiment,
)
from .hom import HomScenario, RealizabilityQuery, make_realizability_query
from .procedure import (
    DeterministicProcedure,
    PossibilisticProcedure,
    ProbabilisticProcedure,
    Procedure,
    make_deterministic_procedure,
    make_possibilistic_procedure,
    make_probabilistic_procedure,
)
from .scenario import ZERO, Assignment, Scenario, dice_scenario, make_scenario
from .utils import context_key, format_rational, parse_rational

logger = logging.getLogger(__name__)

DICE_PATTERN = re.compile(r"dice\((\d+)\)")


def load_json(path: Union[str, Path]) -> Any:
    """Read a JSON document, turning I/O and syntax problems into FormatError."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def _field(data: Any, key: str, kind: type = None) -> Any:
    if not isinstance(data, dict):
        raise FormatError(f"expected an object with key {key!r}, got {type(data).__name__}")
    if key not in data:
        raise FormatError(f"missing key {key!r}")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise FormatError(f"{key!r} must be a {kind.__name__}")
    return value


def _assignment(data: Any) -> Assignment:
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise FormatError(f"assignments are objects of measurement -> outcome strings, got {data!r}")
    return Assignment.of(data)


# Scenarios

def scenario_from_json(data: Any, base_dir: Optional[Path] = None) -> Scenario:
    if isinstance(data, str):
        if data == "zero":
            return ZERO
        match = DICE_PATTERN.fullmatch(data)
        if match:
            return dice_scenario(int(match.group(1)))
        path = Path(data) if base_dir is None else base_dir / data
        logger.debug(f"Loading scenario reference {path}")
        return scenario_from_json(load_json(path), path.parent)
    measurements = _field(data, "measurements", list)
    ids, outcomes = [], {}
    for entry in measurements:
        x = _field(entry, "id", str)
        ids.append(x)
        outcomes[x] = _field(entry, "outcomes", list)
    contexts = _field(data, "maximal_contexts", list)
    return make_scenario(ids, outcomes, contexts)


def scenario_to_json(scenario: Scenario) -> Dict[str, Any]:
    return {
        "measurements": [
            {"id": x, "outcomes": list(outcomes)}
            for x, outcomes in zip(scenario.measurements, scenario.outcome_sets)
        ],
        "maximal_contexts": [list(context_key(facet)) for facet in scenario.facets],
    }


def _scenario_field(data: Any, key: str, base_dir: Optional[Path], default: Optional[Scenario] = None) -> Scenario:
    if isinstance(data, dict) and key not in data and default is not None:
        return default
    return scenario_from_json(_field(data, key), base_dir)


# Models

def model_from_json(data: Any, base_dir: Optional[Path] = None, scenario: Optional[Scenario] = None) -> AnyModel:
    """A probabilistic model ("weights" per facet) or a possibilistic one ("support" per facet)."""
    scenario = _scenario_field(data, "scenario", base_dir, scenario)
    entries = _field(data, "distributions", list)
    kinds = {"weights" in entry for entry in entries if isinstance(entry, dict)}
    if len(kinds) > 1:
        raise FormatError("a model mixes weighted and support-only distributions")
    if kinds == {False}:
        supports = {
            tuple(_field(entry, "context", list)): [_assignment(a) for a in _field(entry, "support", list)]
            for entry in entries
        }
        return make_possibilistic_model(scenario, supports)
    raw = {}
    for entry in entries:
        context = tuple(_field(entry, "context", list))
        weights = {}
        for cell in _field(entry, "weights", list):
            assignment = _assignment(_field(cell, "assignment"))
            if assignment in weights:
                raise FormatError(f"{assignment} listed twice on context {list(context)}")
            weights[assignment] = _field(cell, "p")
        raw[context] = weights
    return make_empirical_model(scenario, raw)


def model_to_json(model: AnyModel, include_scenario: bool = True) -> Dict[str, Any]:
    scenario = model.scenario
    entries = []
    for facet in scenario.facets:
        entry: Dict[str, Any] = {"context": list(context_key(facet))}
        if isinstance(model, EmpiricalModel):
            weights = model.distributions[facet].weights
            entry["weights"] = [
                {"assignment": a.as_dict(), "p": format_rational(weights[a])}
                for a in sorted(weights, key=scenario.assignment_key)
            ]
        else:
            entry["support"] = [a.as_dict() for a in sorted(model.supports[facet], key=scenario.assignment_key)]
        entries.append(entry)
    data: Dict[str, Any] = {"distributions": entries}
    if include_scenario:
        data["scenario"] = scenario_to_json(scenario)
    return data


# Procedures

def _component_from_json(entry: Any, source: Scenario, target: Scenario) -> DeterministicProcedure:
    pi = _field(entry, "pi", dict)
    alpha = {}
    for x, rows in _field(entry, "alpha", dict).items():
        if not isinstance(rows, list):
            raise FormatError(f"alpha for {x!r} must be a list of rows")
        alpha[x] = [(_assignment(_field(row, "in")), _field(row, "out", str)) for row in rows]
    return make_deterministic_procedure(source, target, pi, alpha)


def procedure_from_json(data: Any, base_dir: Optional[Path] = None) -> Procedure:
    """Single weight-1 components decode to deterministic procedures.

    With ``"kind": "possibilistic"`` the mixture entries carry no weights.
    """
    source = _scenario_field(data, "source", base_dir)
    target = _scenario_field(data, "target", base_dir)
    entries = _field(data, "mixture", list)
    components = [_component_from_json(entry, source, target) for entry in entries]
    if data.get("kind") == "possibilistic":
        return make_possibilistic_procedure(components)
    weights = [parse_rational(_field(entry, "weight")) for entry in entries]
    mixture = make_probabilistic_procedure(zip(weights, components))
    if len(mixture.components) == 1:
        return mixture.components[0][1]
    return mixture


def _component_to_json(procedure: DeterministicProcedure) -> Dict[str, Any]:
    return {
        "pi": {x: list(context_key(local.subset)) for x, local in procedure.tables},
        "alpha": {
            x: [{"in": s.as_dict(), "out": out} for s, out in local.rows]
            for x, local in procedure.tables
        },
    }


def procedure_to_json(procedure: Procedure) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "source": scenario_to_json(procedure.source),
        "target": scenario_to_json(procedure.target),
    }
    if isinstance(procedure, PossibilisticProcedure):
        data["kind"] = "possibilistic"
        data["mixture"] = [_component_to_json(f) for f in procedure.members]
        return data
    components = procedure.components
    data["mixture"] = [dict(_component_to_json(f), weight=format_rational(w)) for w, f in components]
    return data


# Games and predicates

def game_from_json(data: Any, base_dir: Optional[Path] = None) -> Experiment:
    """An experiment in procedure form, or a game given by weighted components.

    Components carry either an ``accept`` list or a ``payoffs`` table with
    values in [0, 1].
    """
    if isinstance(data, dict) and "mixture" in data:
        procedure = procedure_from_json(data, base_dir)
        if isinstance(procedure, PossibilisticProcedure):
            raise FormatError("games need a probabilistic procedure")
        return make_experiment(procedure)
    source = _scenario_field(data, "source", base_dir)
    entries = _field(data, "components", list)
    if all(isinstance(entry, dict) and "accept" in entry for entry in entries):
        return game_from_components(source, [
            (_field(entry, "weight"), _field(entry, "context", list),
             [_assignment(a) for a in _field(entry, "accept", list)])
            for entry in entries
        ])
    return payoff_experiment(source, [
        (_field(entry, "weight"), _field(entry, "context", list),
         {_assignment(_field(cell, "assignment")): _field(cell, "value") for cell in _field(entry, "payoffs", list)})
        for entry in entries
    ])


def predicate_from_json(data: Any, base_dir: Optional[Path] = None) -> PossibilisticPredicate:
    scenario = _scenario_field(data, "scenario", base_dir)
    return make_predicate(scenario, [
        (_field(entry, "context", list), [_assignment(a) for a in _field(entry, "accept", list)])
        for entry in _field(data, "components", list)
    ])


def predicate_to_json(predicate: PossibilisticPredicate, include_scenario: bool = True) -> Dict[str, Any]:
    scenario = predicate.scenario
    data: Dict[str, Any] = {
        "components": [
            {
                "context": list(context_key(sigma)),
                "accept": [a.as_dict() for a in sorted(accept, key=scenario.assignment_key)],
            }
            for sigma, accept in predicate.components
        ],
    }
    if include_scenario:
        data["scenario"] = scenario_to_json(scenario)
    return data


def canonical_result_to_json(result: Union[PossibilisticModel, Unsatisfiable]) -> Any:
    if isinstance(result, Unsatisfiable):
        return "unsatisfiable"
    return model_to_json(result)


# Realizability and hom scenarios

def query_from_json(data: Any, base_dir: Optional[Path] = None) -> RealizabilityQuery:
    source = _scenario_field(data, "source", base_dir)
    target = _scenario_field(data, "target", base_dir)
    values = {}
    for entry in _field(data, "F", list):
        s = _assignment(_field(entry, "assignment"))
        if s in values:
            raise FormatError(f"F lists {s} twice")
        model = model_from_json(_field(entry, "model"), base_dir, scenario=target)
        values[s] = model
    return make_realizability_query(source, target, values)


def query_to_json(query: RealizabilityQuery) -> Dict[str, Any]:
    return {
        "source": scenario_to_json(query.source),
        "target": scenario_to_json(query.target),
        "F": [{"assignment": s.as_dict(), "model": model_to_json(model, include_scenario=False)}
              for s, model in query.table],
    }


def hom_to_json(hom: HomScenario, predicate: PossibilisticPredicate) -> Dict[str, Any]:
    return {
        "scenario": scenario_to_json(hom.base),
        "predicate": predicate_to_json(predicate, include_scenario=False),
    }


# Analysis results

def _verdict(flag: Optional[bool]) -> Optional[str]:
    if flag is None:
        return None
    return "contextual" if flag else "noncontextual"


def weights_to_json(scenario: Scenario, weights: Mapping[Assignment, Fraction]) -> List[Dict[str, Any]]:
    return [
        {"assignment": s.as_dict(), "p": format_rational(weights[s])}
        for s in sorted(weights, key=scenario.assignment_key)
    ]


def hierarchy_to_json(report: HierarchyReport, scenario: Scenario) -> Dict[str, Any]:
    witness = report.witness
    if isinstance(witness, LocalSection):
        encoded: Any = {
            "kind": "local_section",
            "context": list(context_key(witness.facet)),
            "assignment": witness.assignment.as_dict(),
        }
    elif witness is None:
        encoded = None
    else:
        encoded = {"kind": "global_distribution", "weights": weights_to_json(scenario, witness)}
    return {
        "probabilistic": _verdict(report.probabilistically_contextual),
        "logical": _verdict(report.logically_contextual),
        "strong": _verdict(report.strongly_contextual),
        "witness": encoded,
    }


def to_json(value: Any) -> Any:
    """Encode any catalog value."""
    if isinstance(value, Scenario):
        return scenario_to_json(value)
    if isinstance(value, (EmpiricalModel, PossibilisticModel)):
        return model_to_json(value)
    if isinstance(value, (DeterministicProcedure, ProbabilisticProcedure, PossibilisticProcedure)):
        return procedure_to_json(value)
    if isinstance(value, Experiment):
        return procedure_to_json(value.procedure)
    if isinstance(value, PossibilisticPredicate):
        return predicate_to_json(value)
    if isinstance(value, RealizabilityQuery):
        return query_to_json(value)
    raise FormatError(f"no JSON encoding for {type(value).__name__}")
