"""Experiments, games and possibilistic predicates.

An experiment is a probabilistic procedure into dice(n); a game is a
two-outcome experiment whose outcome "1" means "win". A possibilistic
predicate is a Boolean mixture of deterministic predicates, each a context
together with a set of accepted joint outcomes.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .contextuality import global_assignments, global_support
from .empirical import (
    AnyModel,
    ContextDistribution,
    EmpiricalModel,
    PossibilisticModel,
    as_possibilistic,
    make_possibilistic_model,
    sorted_support,
)
from .errors import (
    EmptyCollection,
    IncompleteTable,
    InternalError,
    NotAContext,
    NotAnExperiment,
    NotDichotomic,
    NotProbabilistic,
    ScenarioMismatch,
    ValidationError,
)
from .models import DEFAULT_ASSIGNMENT_BUDGET
from .procedure import (
    DeterministicProcedure,
    LocalTable,
    PossibilisticProcedure,
    ProbabilisticProcedure,
    make_possibilistic_procedure,
    make_probabilistic_procedure,
    procedure_from_tables,
    pushforward,
)
from .scenario import DICE_MEASUREMENT, Assignment, Context, Scenario, dice_scenario, dice_size
from .utils import check_budget, format_context, format_rational, parse_rational

logger = logging.getLogger(__name__)

WIN = Assignment(((DICE_MEASUREMENT, "1"),))


@dataclass(frozen=True)
class Experiment:
    """A probabilistic procedure S -> dice(n)."""
    procedure: ProbabilisticProcedure
    n: int

    @property
    def source(self) -> Scenario:
        return self.procedure.source


@dataclass(frozen=True)
class PossibilisticPredicate:
    scenario: Scenario
    components: Tuple[Tuple[Context, frozenset], ...]


@dataclass(frozen=True)
class Unsatisfiable:
    """No model satisfies the predicate; ``facet`` is where pruning emptied."""
    facet: Optional[Context] = None


def make_experiment(procedure: Union[DeterministicProcedure, ProbabilisticProcedure]) -> Experiment:
    if isinstance(procedure, PossibilisticProcedure):
        raise NotAnExperiment("an experiment needs a probabilistic procedure")
    n = dice_size(procedure.target)
    if n is None:
        raise NotAnExperiment(f"target {procedure.target} is not a dice scenario")
    if isinstance(procedure, DeterministicProcedure):
        procedure = ProbabilisticProcedure(((Fraction(1), procedure),))
    return Experiment(procedure, n)


def _accept_test(source: Scenario, context: Context, accept: frozenset) -> DeterministicProcedure:
    rows = tuple((s, "1" if s in accept else "0") for s in source.iter_assignments(context))
    return procedure_from_tables(source, dice_scenario(2), {DICE_MEASUREMENT: LocalTable(context, rows)})


def _checked_component(source: Scenario, context: Iterable[str], accept: Iterable[Any]) -> Tuple[Context, frozenset]:
    sigma = source.check_measurements(context)
    if not source.is_context(sigma):
        raise NotAContext(f"{format_context(sigma)} is not a context")
    chosen = set()
    for raw in accept:
        assignment = raw if isinstance(raw, Assignment) else Assignment.of(dict(raw))
        source.validate_assignment(assignment, sigma)
        chosen.add(assignment)
    return sigma, frozenset(chosen)


def game_from_components(source: Scenario, components: Sequence[Tuple[Any, Iterable[str], Iterable[Any]]]) -> Experiment:
    """A two-outcome experiment from (weight, context, accept set) triples."""
    mixture = []
    for weight, context, accept in components:
        sigma, chosen = _checked_component(source, context, accept)
        mixture.append((weight, _accept_test(source, sigma, chosen)))
    return make_experiment(make_probabilistic_procedure(mixture))


def payoff_experiment(source: Scenario, components: Sequence[Tuple[Any, Iterable[str], Mapping[Any, Any]]]) -> Experiment:
    """A game with payoffs in [0, 1], as a mixture of threshold predicates.

    Each payoff table W on a context is split into the predicates W >= v over
    its distinct positive values v, weighted by the gaps between consecutive
    values; the rest of the component's weight goes to rejecting everything.
    """
    layers = []
    for weight, context, payoffs in components:
        w = parse_rational(weight)
        sigma = source.check_measurements(context)
        values = {}
        for raw, value in payoffs.items():
            assignment = raw if isinstance(raw, Assignment) else Assignment.of(dict(raw))
            source.validate_assignment(assignment, sigma)
            v = parse_rational(value)
            if not 0 <= v <= 1:
                raise ValidationError(f"payoff {format_rational(v)} for {assignment} is outside [0, 1]")
            values[assignment] = v
        if len(values) != source.count_assignments(sigma):
            raise IncompleteTable(f"payoff table on {format_context(sigma)} is not total")
        previous = Fraction(0)
        for level in sorted({v for v in values.values() if v > 0}):
            accept = frozenset(s for s, v in values.items() if v >= level)
            layers.append((w * (level - previous), sigma, accept))
            previous = level
        if previous < 1:
            layers.append((w * (1 - previous), sigma, frozenset()))
    return game_from_components(source, [layer for layer in layers if layer[0] > 0])


def outcome_distribution(experiment: Experiment, model: EmpiricalModel) -> ContextDistribution:
    """The pushforward distribution on dice(n)."""
    if not isinstance(model, EmpiricalModel):
        raise NotProbabilistic("outcome distributions need a probabilistic model, not a support")
    if model.scenario != experiment.source:
        raise ScenarioMismatch("model does not live on the experiment's source")
    image = pushforward(experiment.procedure, model)
    return image.distributions[frozenset([DICE_MEASUREMENT])]


def model_value(experiment: Experiment, model: EmpiricalModel) -> Fraction:
    """Winning probability of a model in a two-outcome game."""
    if experiment.n != 2:
        raise NotAnExperiment(f"model values need a two-outcome experiment, got dice({experiment.n})")
    return outcome_distribution(experiment, model).probability(WIN)


def classical_value(experiment: Experiment, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> Tuple[Fraction, Assignment]:
    """Best value over deterministic strategies, with the first maximizing assignment."""
    if experiment.n != 2:
        raise NotAnExperiment(f"classical values need a two-outcome experiment, got dice({experiment.n})")
    best, maximizer = None, None
    for s in global_assignments(experiment.source, budget):
        value = sum(
            (w for w, f in experiment.procedure.components if f.translate(DICE_MEASUREMENT, s) == "1"),
            Fraction(0),
        )
        if best is None or value > best:
            best, maximizer = value, s
    logger.info(f"Classical value {format_rational(best)} attained at {maximizer}")
    return best, maximizer


# Possibilistic predicates

def make_predicate(scenario: Scenario, components: Iterable[Tuple[Iterable[str], Iterable[Any]]]) -> PossibilisticPredicate:
    checked = tuple(_checked_component(scenario, context, accept) for context, accept in components)
    if not checked:
        raise EmptyCollection("a predicate needs at least one component")
    return PossibilisticPredicate(scenario, checked)


def satisfies(model: AnyModel, predicate: PossibilisticPredicate) -> bool:
    """Every component's context has its support inside the accept set."""
    if model.scenario != predicate.scenario:
        raise ScenarioMismatch("model and predicate live on different scenarios")
    support = as_possibilistic(model)
    return all(support.marginal(sigma) <= accept for sigma, accept in predicate.components)


def predicate_from_model(model: AnyModel) -> PossibilisticPredicate:
    """g(e): one component per facet, accepting exactly the support there."""
    support = as_possibilistic(model)
    return PossibilisticPredicate(
        support.scenario,
        tuple((facet, support.supports[facet]) for facet in support.scenario.facets),
    )


def trivial_predicate(scenario: Scenario) -> PossibilisticPredicate:
    return PossibilisticPredicate(
        scenario,
        tuple((facet, frozenset(scenario.iter_assignments(facet))) for facet in scenario.facets),
    )


def _initial_candidates(predicate: PossibilisticPredicate) -> dict:
    scenario = predicate.scenario
    candidates = {}
    for facet in scenario.facets:
        relevant = [(sigma, accept) for sigma, accept in predicate.components if sigma <= facet]
        candidates[facet] = {
            t for t in scenario.iter_assignments(facet)
            if all(t.restrict(sigma) in accept for sigma, accept in relevant)
        }
    return candidates


def canonical_model_of_predicate(
    predicate: PossibilisticPredicate,
    budget: int = DEFAULT_ASSIGNMENT_BUDGET,
) -> Union[PossibilisticModel, Unsatisfiable]:
    """The largest possibilistic model satisfying the predicate, by fixpoint pruning."""
    scenario = predicate.scenario
    check_budget("facet assignments", sum(scenario.count_assignments(f) for f in scenario.facets), budget)
    initial = _initial_candidates(predicate)
    candidates = {facet: set(cells) for facet, cells in initial.items()}
    for facet in scenario.facets:
        if not candidates[facet]:
            logger.info(f"Predicate is unsatisfiable: nothing accepted on {format_context(facet)}")
            return Unsatisfiable(facet)

    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for facet in scenario.facets:
            for other in scenario.facets:
                if other == facet:
                    continue
                overlap = facet & other
                reachable = {u.restrict(overlap) for u in candidates[other]}
                pruned = {t for t in candidates[facet] if t.restrict(overlap) in reachable}
                if len(pruned) != len(candidates[facet]):
                    candidates[facet] = pruned
                    changed = True
                if not pruned:
                    logger.info(f"Predicate is unsatisfiable: pruning emptied {format_context(facet)}")
                    return Unsatisfiable(facet)
    logger.debug(f"Pruning stabilized after {sweeps} sweeps")

    model = make_possibilistic_model(scenario, {facet: frozenset(cells) for facet, cells in candidates.items()})
    if not satisfies(model, predicate):
        raise InternalError("canonical model does not satisfy its predicate")
    if scenario.count_assignments(scenario.measurements) <= budget:
        unpruned = PossibilisticModel(scenario, {facet: frozenset(cells) for facet, cells in initial.items()})
        for s in global_support(unpruned, budget).assignments:
            if any(s.restrict(facet) not in candidates[facet] for facet in scenario.facets):
                raise InternalError(f"canonical model misses the satisfying deterministic model at {s}")
    else:
        logger.debug("Skipping domination check: too many global assignments")
    return model


def predicate_leq(smaller: PossibilisticPredicate, larger: PossibilisticPredicate,
                  budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    """Every model satisfying ``smaller`` satisfies ``larger``."""
    if smaller.scenario != larger.scenario:
        raise ScenarioMismatch("predicates live on different scenarios")
    canonical = canonical_model_of_predicate(smaller, budget)
    if isinstance(canonical, Unsatisfiable):
        return True
    return satisfies(canonical, larger)


def ks_predicate(scenario: Scenario) -> PossibilisticPredicate:
    """Per facet, accept the assignments giving "1" to exactly one measurement."""
    for x, outcomes in zip(scenario.measurements, scenario.outcome_sets):
        if sorted(outcomes) != ["0", "1"]:
            raise NotDichotomic(f"measurement {x!r} does not have outcomes 0 and 1")
    return PossibilisticPredicate(
        scenario,
        tuple(
            (facet, frozenset(t for t in scenario.iter_assignments(facet)
                              if sum(o == "1" for _, o in t.items) == 1))
            for facet in scenario.facets
        ),
    )


def predicate_to_procedure(predicate: PossibilisticPredicate) -> PossibilisticProcedure:
    return make_possibilistic_procedure(
        _accept_test(predicate.scenario, sigma, accept) for sigma, accept in predicate.components
    )


def predicate_from_procedure(procedure: Union[DeterministicProcedure, PossibilisticProcedure]) -> PossibilisticPredicate:
    """Read the (context, accept set) of each component off a Boolean mixture into dice(2)."""
    members = (procedure,) if isinstance(procedure, DeterministicProcedure) else procedure.members
    if dice_size(procedure.target) != 2:
        raise NotAnExperiment("predicates are procedures into dice(2)")
    components = []
    for f in members:
        local = f.local(DICE_MEASUREMENT)
        components.append((local.subset, frozenset(s for s, out in local.rows if out == "1")))
    return PossibilisticPredicate(procedure.source, tuple(components))


def accept_sets(predicate: PossibilisticPredicate) -> List[Tuple[Context, List[Assignment]]]:
    """Components with accept sets in enumeration order, for display."""
    return [(sigma, sorted_support(predicate.scenario, accept)) for sigma, accept in predicate.components]
