"""Empirical models: compatible families of distributions, one per facet.

Distributions are exact and sparse (only nonzero weights are stored).
Compatibility is checked eagerly on every pair of facets when a model is built.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple, Union

from .errors import (
    EmptyCollection,
    EmptySupport,
    IncompatibleMarginals,
    IncompatibleSupports,
    InvalidAssignment,
    MissingFacet,
    NegativeWeight,
    NotAContext,
    NotAFacet,
    NotGlobal,
    NotNormalized,
    ScenarioMismatch,
)
from .scenario import Assignment, Context, Scenario
from .utils import format_context, format_rational, parse_rational

logger = logging.getLogger(__name__)

Table = Dict[Context, Dict[Assignment, Fraction]]


@dataclass(frozen=True, eq=True)
class ContextDistribution:
    """A distribution on Ev(context), zero weights omitted."""
    context: Context
    weights: Mapping[Assignment, Fraction]

    __hash__ = None

    def probability(self, assignment: Assignment) -> Fraction:
        return self.weights.get(assignment, Fraction(0))

    def support(self) -> FrozenSet[Assignment]:
        return frozenset(self.weights)

    def restrict(self, subcontext: Iterable[str]) -> "ContextDistribution":
        """Marginal on a subset of the context."""
        tau = frozenset(subcontext)
        if not tau <= self.context:
            raise NotAContext(
                f"{format_context(tau)} is not inside {format_context(self.context)}"
            )
        return ContextDistribution(tau, _push(self.weights, lambda s: s.restrict(tau)))


def _push(weights: Mapping[Assignment, Fraction], fn) -> Dict[Assignment, Fraction]:
    image: Dict[Assignment, Fraction] = defaultdict(Fraction)
    for assignment, weight in weights.items():
        image[fn(assignment)] += weight
    return {a: w for a, w in image.items() if w != 0}


@dataclass(frozen=True, eq=True)
class EmpiricalModel:
    """One distribution per facet of the scenario, pairwise compatible."""
    scenario: Scenario
    distributions: Mapping[Context, ContextDistribution]

    __hash__ = None

    def __getitem__(self, facet: Iterable[str]) -> ContextDistribution:
        return self.distributions[frozenset(facet)]

    def marginal(self, context: Iterable[str]) -> ContextDistribution:
        return marginal(self, context)

    def table(self) -> Table:
        """Plain nested-dict copy of the weights."""
        return {facet: dict(self.distributions[facet].weights) for facet in self.scenario.facets}


@dataclass(frozen=True, eq=True)
class PossibilisticModel:
    """One non-empty support per facet, restrictions agreeing on overlaps."""
    scenario: Scenario
    supports: Mapping[Context, FrozenSet[Assignment]]

    __hash__ = None

    def __getitem__(self, facet: Iterable[str]) -> FrozenSet[Assignment]:
        return self.supports[frozenset(facet)]

    def marginal(self, context: Iterable[str]) -> FrozenSet[Assignment]:
        tau = frozenset(context)
        if not self.scenario.is_context(tau):
            raise NotAContext(f"{format_context(tau)} is not a context")
        facet = self.scenario.facets_containing(tau)[0]
        return frozenset(s.restrict(tau) for s in self.supports[facet])


AnyModel = Union[EmpiricalModel, PossibilisticModel]


def make_empirical_model(scenario: Scenario, raw: Mapping[Any, Mapping[Any, Any]]) -> EmpiricalModel:
    """Validate raw facet distributions into an EmpiricalModel.

    ``raw`` maps each facet (any iterable of ids) to a mapping from
    assignments (Assignment or plain dict) to rationals ("p/q", int or Fraction).
    """
    given = _facet_keyed(scenario, raw)
    distributions = {}
    for facet in scenario.facets:
        weights: Dict[Assignment, Fraction] = {}
        for key, value in given[facet].items():
            assignment = _as_assignment(scenario, key, facet)
            weight = parse_rational(value)
            if weight < 0:
                raise NegativeWeight(
                    f"negative weight {format_rational(weight)} for {assignment} on {format_context(facet)}"
                )
            if assignment in weights:
                raise InvalidAssignment(f"{assignment} listed twice on {format_context(facet)}")
            weights[assignment] = weight
        total = sum(weights.values(), Fraction(0))
        if total != 1:
            raise NotNormalized(
                f"weights on {format_context(facet)} sum to {format_rational(total)}, not 1"
            )
        distributions[facet] = ContextDistribution(facet, {a: w for a, w in weights.items() if w != 0})
    _check_compatible(scenario, distributions)
    return EmpiricalModel(scenario, distributions)


def _facet_keyed(scenario: Scenario, raw: Mapping[Any, Any]) -> Dict[Context, Any]:
    given = {}
    for key, value in raw.items():
        facet = frozenset(key)
        if facet not in scenario.facets:
            if scenario.is_context(facet):
                raise NotAFacet(f"{format_context(facet)} is a context but not a maximal one")
            raise NotAContext(f"{format_context(facet)} is not a context")
        given[facet] = value
    for facet in scenario.facets:
        if facet not in given:
            raise MissingFacet(f"no distribution for facet {format_context(facet)}")
    return given


def _as_assignment(scenario: Scenario, key: Any, facet: Context) -> Assignment:
    assignment = key if isinstance(key, Assignment) else Assignment.of(dict(key))
    scenario.validate_assignment(assignment, facet)
    return assignment


def _check_compatible(scenario: Scenario, distributions: Mapping[Context, ContextDistribution]) -> None:
    for first, second in itertools.combinations(scenario.facets, 2):
        overlap = first & second
        left = distributions[first].restrict(overlap).weights
        right = distributions[second].restrict(overlap).weights
        if left != right:
            differing = [a for a in set(left) | set(right) if left.get(a) != right.get(a)]
            cell = min(differing, key=scenario.assignment_key)
            detail = (f"{cell} has weight {format_rational(left.get(cell, 0))} "
                      f"vs {format_rational(right.get(cell, 0))}")
            raise IncompatibleMarginals((first, second), overlap, detail)


def marginal(model: EmpiricalModel, context: Iterable[str]) -> ContextDistribution:
    """Marginal on any context, computed from the first facet containing it."""
    tau = frozenset(context)
    if not model.scenario.is_context(tau):
        raise NotAContext(f"{format_context(tau)} is not a context")
    facet = model.scenario.facets_containing(tau)[0]
    return model.distributions[facet].restrict(tau)


def deterministic_model(scenario: Scenario, assignment: Assignment) -> EmpiricalModel:
    """The model δ_s: a point mass at s restricted to every facet."""
    if assignment.domain != scenario.measurement_set:
        raise NotGlobal(f"{assignment} is not a global assignment")
    scenario.validate_assignment(assignment)
    return EmpiricalModel(
        scenario,
        {facet: ContextDistribution(facet, {assignment.restrict(facet): Fraction(1)})
         for facet in scenario.facets},
    )


def weighted_sum(terms: Sequence[Tuple[Any, EmpiricalModel]]) -> Table:
    """Contextwise Σ r_i e_i with arbitrary (possibly negative) rational r_i."""
    if not terms:
        raise EmptyCollection("nothing to combine")
    scenario = terms[0][1].scenario
    table: Table = {facet: defaultdict(Fraction) for facet in scenario.facets}
    for weight, model in terms:
        if model.scenario != scenario:
            raise ScenarioMismatch("cannot combine models on different scenarios")
        r = parse_rational(weight)
        if r == 0:
            continue
        for facet in scenario.facets:
            cell = table[facet]
            for assignment, p in model.distributions[facet].weights.items():
                cell[assignment] += r * p
    return {facet: {a: w for a, w in cells.items() if w != 0} for facet, cells in table.items()}


def convex_combine(terms: Sequence[Tuple[Any, EmpiricalModel]]) -> EmpiricalModel:
    """Contextwise mixture with nonnegative weights summing to 1."""
    if not terms:
        raise NotNormalized("empty mixture")
    weights = [parse_rational(w) for w, _ in terms]
    for w in weights:
        if w < 0:
            raise NegativeWeight(f"negative mixture weight {format_rational(w)}")
    if sum(weights, Fraction(0)) != 1:
        raise NotNormalized(f"mixture weights sum to {format_rational(sum(weights, Fraction(0)))}")
    scenario = terms[0][1].scenario
    return make_empirical_model(scenario, weighted_sum(list(zip(weights, (m for _, m in terms)))))


def models_equal_table(model: EmpiricalModel, table: Table) -> bool:
    """Exact comparison of a model against a plain table."""
    return all(
        dict(model.distributions[facet].weights) == {a: w for a, w in table.get(facet, {}).items() if w != 0}
        for facet in model.scenario.facets
    )


def make_possibilistic_model(scenario: Scenario, raw: Mapping[Any, Iterable[Any]]) -> PossibilisticModel:
    """Validate raw facet supports into a PossibilisticModel."""
    given = _facet_keyed(scenario, raw)
    supports = {}
    for facet in scenario.facets:
        support = frozenset(_as_assignment(scenario, key, facet) for key in given[facet])
        if not support:
            raise EmptySupport(f"empty support on {format_context(facet)}")
        supports[facet] = support
    for first, second in itertools.combinations(scenario.facets, 2):
        overlap = first & second
        if ({s.restrict(overlap) for s in supports[first]}
                != {s.restrict(overlap) for s in supports[second]}):
            raise IncompatibleSupports((first, second), overlap)
    return PossibilisticModel(scenario, supports)


def possibilistic_collapse(model: EmpiricalModel) -> PossibilisticModel:
    return PossibilisticModel(
        model.scenario,
        {facet: dist.support() for facet, dist in model.distributions.items()},
    )


def as_possibilistic(model: AnyModel) -> PossibilisticModel:
    if isinstance(model, EmpiricalModel):
        return possibilistic_collapse(model)
    return model


def possibilistic_join(models: Sequence[PossibilisticModel]) -> PossibilisticModel:
    """Facet-wise union."""
    if not models:
        raise EmptyCollection("join of no models")
    scenario = models[0].scenario
    _same_scenario(scenario, models)
    return PossibilisticModel(
        scenario,
        {facet: frozenset().union(*(m.supports[facet] for m in models)) for facet in scenario.facets},
    )


def possibilistic_leq(smaller: PossibilisticModel, larger: PossibilisticModel) -> bool:
    """Facet-wise inclusion of supports."""
    _same_scenario(smaller.scenario, [larger])
    return all(smaller.supports[f] <= larger.supports[f] for f in smaller.scenario.facets)


def full_support_model(scenario: Scenario) -> PossibilisticModel:
    """The largest possibilistic model: every assignment possible."""
    return PossibilisticModel(
        scenario,
        {facet: frozenset(scenario.iter_assignments(facet)) for facet in scenario.facets},
    )


def _same_scenario(scenario: Scenario, models: Iterable[AnyModel]) -> None:
    for model in models:
        if model.scenario != scenario:
            raise ScenarioMismatch("models live on different scenarios")


def sorted_support(scenario: Scenario, support: Iterable[Assignment]) -> List[Assignment]:
    return sorted(support, key=scenario.assignment_key)
