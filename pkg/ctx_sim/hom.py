"""The hom-scenario [S, T] and the realizability decision procedure.

The measurements of [S, T] are those of T. An outcome at x is a pair <U, k>:
a set U of source measurements and a table k from Ev_S(U) to the outcomes
of x. Global assignments of [S, T] whose deterministic model satisfies the
predicate g_{S,T} are exactly the deterministic procedures S -> T.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Mapping, Optional, Tuple, Union

from .contextuality import Contextual, global_assignments, is_noncontextual, mixture_table
from .empirical import (
    EmpiricalModel,
    PossibilisticModel,
    deterministic_model,
    full_support_model,
    make_empirical_model,
)
from .errors import InternalError, MalformedQuery, NotGlobal, ScenarioMismatch, UnsatisfiablePredicate
from .exactlp import Feasible, make_linear_system, solve_feasibility
from .games import (
    PossibilisticPredicate,
    Unsatisfiable,
    canonical_model_of_predicate,
    predicate_from_model,
)
from .models import DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_HOM_OUTCOME_BUDGET, DEFAULT_PIVOT_LIMIT, DEFAULT_PROCEDURE_BUDGET
from .procedure import (
    DeterministicProcedure,
    LocalTable,
    ProbabilisticProcedure,
    as_mixture,
    candidate_tables,
    enumerate_deterministic_procedures,
    is_simulation,
    make_probabilistic_procedure,
    procedure_from_tables,
    pushforward,
)
from .scenario import EMPTY_ASSIGNMENT, Assignment, Context, Scenario, ZERO, make_scenario
from .utils import check_budget, format_context, subsets

logger = logging.getLogger(__name__)

HomOutcome = LocalTable


@dataclass(frozen=True)
class HomScenario:
    """[S, T]: the base scenario plus the pairs behind its outcome labels."""
    source: Scenario
    target: Scenario
    base: Scenario
    outcome_values: Tuple[Tuple[HomOutcome, ...], ...]

    @cached_property
    def _by_label(self) -> Dict[str, Dict[str, HomOutcome]]:
        return {
            x: {value.label(): value for value in values}
            for x, values in zip(self.base.measurements, self.outcome_values)
        }

    def outcome(self, measurement: str, label: str) -> HomOutcome:
        self.base.outcome_position(measurement, label)
        return self._by_label[measurement][label]

    def family(self, assignment: Assignment) -> Dict[str, HomOutcome]:
        return {x: self.outcome(x, label) for x, label in assignment.items}

    def accepts(self, facet: Context, assignment: Assignment) -> bool:
        """Membership in g_{S,T}'s accept set at ``facet``: the queried union is a context."""
        used = frozenset().union(*(value.subset for value in self.family(assignment).values()))
        return self.source.is_context(used)

    def predicate(self, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> PossibilisticPredicate:
        """g_{S,T}, materialized."""
        check_budget("hom facet assignments", sum(self.base.count_assignments(f) for f in self.base.facets), budget)
        return PossibilisticPredicate(
            self.base,
            tuple(
                (facet, frozenset(t for t in self.base.iter_assignments(facet) if self.accepts(facet, t)))
                for facet in self.base.facets
            ),
        )


@lru_cache(maxsize=32)
def hom_scenario(source: Scenario, target: Scenario, budget: int = DEFAULT_HOM_OUTCOME_BUDGET) -> HomScenario:
    """Build [S, T], enumerating outcomes by |U|, then U, then table rows."""
    domains = list(subsets(source.measurements))
    values = tuple(
        tuple(candidate_tables(source, target, x, canonical=False, budget=budget, domains=domains))
        for x in target.measurements
    )
    base = make_scenario(
        target.measurements,
        {x: [value.label() for value in outcomes] for x, outcomes in zip(target.measurements, values)},
        target.facets,
    )
    logger.debug(f"Hom scenario has {[len(v) for v in values]} outcomes per measurement")
    return HomScenario(source, target, base, values)


def procedure_to_assignment(procedure: DeterministicProcedure) -> Assignment:
    """The global assignment of [S, T] naming a deterministic procedure."""
    return Assignment(tuple((x, local.label()) for x, local in procedure.tables))


def assignment_to_procedure(hom: HomScenario, assignment: Assignment) -> DeterministicProcedure:
    """Inverse of procedure_to_assignment; NotSimplicial when g_{S,T} rejects it."""
    if assignment.domain != hom.base.measurement_set:
        raise NotGlobal(f"{assignment} is not a global assignment of the hom scenario")
    return procedure_from_tables(hom.source, hom.target, hom.family(assignment))


def procedure_to_model(hom: HomScenario, procedure: Union[DeterministicProcedure, ProbabilisticProcedure]) -> EmpiricalModel:
    """The non-contextual model on [S, T] mixing the names of the components."""
    if procedure.source != hom.source or procedure.target != hom.target:
        raise ScenarioMismatch("procedure endpoints differ from the hom scenario's")
    weights: Dict[Assignment, Fraction] = {}
    for w, f in as_mixture(procedure).components:
        s = procedure_to_assignment(f)
        # a mixture of global deltas is non-contextual
        hom.base.validate_assignment(s, hom.base.measurement_set)
        weights[s] = weights.get(s, Fraction(0)) + w
    model = make_empirical_model(hom.base, mixture_table(hom.base, weights))
    for facet in hom.base.facets:
        if not all(hom.accepts(facet, t) for t in model.distributions[facet].weights):
            raise InternalError(f"model of a procedure violates g_S,T on {format_context(facet)}")
    return model


# Realizability

@dataclass(frozen=True)
class RealizabilityQuery:
    """F: a model on the target for every global assignment of the source."""
    source: Scenario
    target: Scenario
    table: Tuple[Tuple[Assignment, EmpiricalModel], ...]

    __hash__ = None

    @cached_property
    def _lookup(self) -> Dict[Assignment, EmpiricalModel]:
        return dict(self.table)

    def __getitem__(self, assignment: Assignment) -> EmpiricalModel:
        return self._lookup[assignment]


@dataclass(frozen=True)
class Realizable:
    witness: ProbabilisticProcedure


@dataclass(frozen=True)
class NotRealizable:
    """No procedure induces F; ``assignment`` is set when F(s) is already contextual."""
    assignment: Optional[Assignment] = None


def make_realizability_query(source: Scenario, target: Scenario, values: Mapping[Assignment, EmpiricalModel],
                             budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> RealizabilityQuery:
    expected = global_assignments(source, budget)
    given = dict(values)
    missing = [s for s in expected if s not in given]
    if missing:
        raise MalformedQuery(f"no model given for global assignment {missing[0]}")
    if len(given) != len(expected):
        extra = next(s for s in given if s not in set(expected))
        raise MalformedQuery(f"{extra} is not a global assignment of the source")
    for s in expected:
        if not isinstance(given[s], EmpiricalModel):
            raise MalformedQuery(f"value at {s} is not a probabilistic model")
        if given[s].scenario != target:
            raise ScenarioMismatch(f"model at {s} does not live on the target")
    return RealizabilityQuery(source, target, tuple((s, given[s]) for s in expected))


def tabulate(procedure: Union[DeterministicProcedure, ProbabilisticProcedure],
             budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> RealizabilityQuery:
    """The query F(s) = EMP(f)(delta_s) induced by a procedure."""
    source = procedure.source
    return RealizabilityQuery(
        source,
        procedure.target,
        tuple((s, pushforward(procedure, deterministic_model(source, s))) for s in global_assignments(source, budget)),
    )


def realizable(
    query: RealizabilityQuery,
    budget: int = DEFAULT_PROCEDURE_BUDGET,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
    screen: bool = True,
    assignment_budget: int = DEFAULT_ASSIGNMENT_BUDGET,
) -> Union[Realizable, NotRealizable]:
    """Decide whether some probabilistic procedure pushes each delta_s to F(s).

    Exact LP over canonical deterministic procedures. With ``screen`` on, a
    contextual F(s) is rejected before the LP is built.
    """
    source, target = query.source, query.target
    if screen:
        for s, model in query.table:
            if isinstance(is_noncontextual(model, assignment_budget, pivot_limit), Contextual):
                logger.info(f"F at {s} is contextual, so no procedure realizes it")
                return NotRealizable(s)

    points = [s for s, _ in query.table]
    columns: Dict[Tuple, DeterministicProcedure] = {}
    for f in enumerate_deterministic_procedures(source, target, budget=budget):
        signature = tuple(f.apply(facet, s) for s in points for facet in target.facets)
        columns.setdefault(signature, f)
    procedures = list(columns.values())
    logger.debug(f"Realizability LP over {len(procedures)} distinct procedures")

    rows = {}
    for k, (s, model) in enumerate(query.table):
        for facet in target.facets:
            dist = model.distributions[facet]
            for t in target.iter_assignments(facet):
                rows[(k, facet, t)] = ({}, dist.probability(t))
    facets = target.facets
    for i, signature in enumerate(columns):
        for position, t in enumerate(signature):
            k, facet = divmod(position, len(facets))
            rows[(k, facets[facet], t)][0][i] = 1
    equalities = list(rows.values())
    equalities.append(({i: 1 for i in range(len(procedures))}, 1))

    result = solve_feasibility(make_linear_system(range(len(procedures)), equalities), pivot_limit=pivot_limit)
    if not isinstance(result, Feasible):
        logger.info("Query is not realizable")
        return NotRealizable()

    witness = make_probabilistic_procedure((w, procedures[i]) for i, w in sorted(result.point.items()) if w > 0)
    for s, model in query.table:
        if pushforward(witness, deterministic_model(source, s)) != model:
            raise InternalError(f"realizability witness misses F at {s}")
    logger.info(f"Query realized by a mixture of {len(witness.components)} procedures")
    return Realizable(witness)


def contextual_via_realizability(model: EmpiricalModel, budget: int = DEFAULT_PROCEDURE_BUDGET,
                                 pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> bool:
    """A model is contextual exactly when nothing simulates it from Zero."""
    query = make_realizability_query(ZERO, model.scenario, {EMPTY_ASSIGNMENT: model})
    return isinstance(realizable(query, budget, pivot_limit, screen=False), NotRealizable)


# Scenarios with structure predicates

@dataclass(frozen=True)
class ScenarioWithPredicate:
    """A scenario whose structure predicate is g(model) for a stored canonical model."""
    scenario: Scenario
    model: PossibilisticModel

    __hash__ = None

    @property
    def predicate(self) -> PossibilisticPredicate:
        return predicate_from_model(self.model)


def make_scenario_with_predicate(scenario: Scenario, predicate: Optional[PossibilisticPredicate] = None,
                                 budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> ScenarioWithPredicate:
    """Attach a structure predicate; the trivial one when ``predicate`` is None."""
    if predicate is None:
        return ScenarioWithPredicate(scenario, full_support_model(scenario))
    if predicate.scenario != scenario:
        raise ScenarioMismatch("predicate lives on a different scenario")
    canonical = canonical_model_of_predicate(predicate, budget)
    if isinstance(canonical, Unsatisfiable):
        raise UnsatisfiablePredicate("structure predicates must be satisfiable")
    return ScenarioWithPredicate(scenario, canonical)


UNIT = ScenarioWithPredicate(ZERO, full_support_model(ZERO))


def _structured_accepts(hom: HomScenario, source: ScenarioWithPredicate, target: ScenarioWithPredicate,
                        facet: Context, assignment: Assignment) -> bool:
    family = hom.family(assignment)
    used = frozenset().union(*(value.subset for value in family.values()))
    if not hom.source.is_context(used):
        return False
    allowed = target.model.supports[facet]
    for s in source.model.marginal(used):
        image = Assignment(tuple((x, family[x](s)) for x in sorted(family)))
        if image not in allowed:
            return False
    return True


def hom_with_predicates(source: ScenarioWithPredicate, target: ScenarioWithPredicate,
                        hom_budget: int = DEFAULT_HOM_OUTCOME_BUDGET,
                        budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> ScenarioWithPredicate:
    """[<S,g>, <T,h>]: families using a context of S and sending g-allowed to h-allowed outcomes."""
    hom = hom_scenario(source.scenario, target.scenario, hom_budget)
    check_budget("hom facet assignments", sum(hom.base.count_assignments(f) for f in hom.base.facets), budget)
    predicate = PossibilisticPredicate(
        hom.base,
        tuple(
            (facet, frozenset(t for t in hom.base.iter_assignments(facet)
                              if _structured_accepts(hom, source, target, facet, t)))
            for facet in hom.base.facets
        ),
    )
    return make_scenario_with_predicate(hom.base, predicate, budget)


def respects_predicates(procedure: Union[DeterministicProcedure, ProbabilisticProcedure],
                        source: ScenarioWithPredicate, target: ScenarioWithPredicate) -> bool:
    """Whether the procedure weakly simulates the source's canonical model into the target's."""
    return is_simulation(procedure, source.model, target.model, mode="weak")

