"""The contextuality hierarchy.

Probabilistic non-contextuality is decided by an exact LP over global
assignments; logical and strong contextuality by a backtracking search for
the global assignments consistent with a model's supports.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Union

from .empirical import (
    AnyModel,
    EmpiricalModel,
    Table,
    as_possibilistic,
    models_equal_table,
    sorted_support,
)
from .errors import InternalError
from .exactlp import Feasible, NoSolution, make_linear_system, solve_feasibility, solve_linear_system
from .models import DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_PIVOT_LIMIT
from .scenario import Assignment, Context, Scenario
from .utils import check_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NonContextual:
    """A global distribution (nonzero weights only) marginalizing to the model."""
    weights: Dict[Assignment, Fraction]

    __hash__ = None


@dataclass(frozen=True)
class Contextual:
    pass


@dataclass(frozen=True)
class GlobalSupport:
    scenario: Scenario
    assignments: FrozenSet[Assignment]

    def is_empty(self) -> bool:
        return not self.assignments

    def ordered(self) -> List[Assignment]:
        return sorted_support(self.scenario, self.assignments)


@dataclass(frozen=True)
class LocalSection:
    """A possible local outcome with no consistent global extension."""
    facet: Context
    assignment: Assignment


@dataclass(frozen=True)
class HierarchyReport:
    """Contextuality flags; ``probabilistically_contextual`` is None for possibilistic input."""
    probabilistically_contextual: Optional[bool]
    logically_contextual: bool
    strongly_contextual: bool
    witness: Union[Dict[Assignment, Fraction], LocalSection, None] = None

    __hash__ = None


def global_assignments(scenario: Scenario, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> List[Assignment]:
    """Ev(X_S) in canonical order, refusing to enumerate past ``budget``."""
    check_budget("global assignments", scenario.count_assignments(scenario.measurements), budget)
    return scenario.enumerate_assignments(scenario.measurements)


def mixture_table(scenario: Scenario, weights: Dict[Assignment, Fraction]) -> Table:
    """Contextwise Σ w_s δ_s for (possibly signed) weights on global assignments."""
    table: Table = {facet: defaultdict(Fraction) for facet in scenario.facets}
    for s, w in weights.items():
        for facet in scenario.facets:
            table[facet][s.restrict(facet)] += w
    return {facet: {a: w for a, w in cells.items() if w != 0} for facet, cells in table.items()}


def _marginal_rows(model: EmpiricalModel, candidates: List[Assignment]):
    """One equality per (facet, local assignment): Σ_{s|C = t} d(s) = e_C(t)."""
    scenario = model.scenario
    rows = {}
    for facet in scenario.facets:
        dist = model.distributions[facet]
        for t in scenario.iter_assignments(facet):
            rows[(facet, t)] = ({}, dist.probability(t))
    for i, s in enumerate(candidates):
        for facet in scenario.facets:
            rows[(facet, s.restrict(facet))][0][i] = 1
    return list(rows.values())


def is_noncontextual(
    model: EmpiricalModel,
    budget: int = DEFAULT_ASSIGNMENT_BUDGET,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
) -> Union[NonContextual, Contextual]:
    """Decide whether the model extends to a global distribution."""
    candidates = global_assignments(model.scenario, budget)
    system = make_linear_system(range(len(candidates)), _marginal_rows(model, candidates))
    result = solve_feasibility(system, pivot_limit=pivot_limit)
    if not isinstance(result, Feasible):
        logger.info(f"Model on {model.scenario} is contextual")
        return Contextual()

    weights = {candidates[i]: w for i, w in result.point.items() if w != 0}
    if not models_equal_table(model, mixture_table(model.scenario, weights)):
        raise InternalError("global distribution does not marginalize to the model")
    logger.info(f"Model is non-contextual; witness uses {len(weights)} global assignments")
    return NonContextual(weights)


def global_support(model: AnyModel, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> GlobalSupport:
    """Global assignments whose restriction to every facet is possible."""
    model = as_possibilistic(model)
    scenario = model.scenario
    check_budget("global assignments", scenario.count_assignments(scenario.measurements), budget)

    order = scenario.measurements
    n = len(order)
    # facets touched at step k, with the part of each facet assigned so far
    checks = []
    for k, x in enumerate(order):
        step = []
        for facet in scenario.facets:
            if x not in facet:
                continue
            domain = tuple(y for y in order[:k + 1] if y in facet)
            allowed = {tuple(s[y] for y in domain) for s in model.supports[facet]}
            step.append((domain, allowed))
        checks.append(step)

    found: List[Assignment] = []
    partial: Dict[str, str] = {}

    def extend(k: int) -> None:
        if k == n:
            found.append(Assignment(tuple((y, partial[y]) for y in order)))
            return
        x = order[k]
        for outcome in scenario.outcomes(x):
            partial[x] = outcome
            if all(tuple(partial[y] for y in domain) in allowed for domain, allowed in checks[k]):
                extend(k + 1)
        del partial[x]

    extend(0)
    logger.debug(f"Global support has {len(found)} assignments")
    return GlobalSupport(scenario, frozenset(found))


def classify(
    model: AnyModel,
    budget: int = DEFAULT_ASSIGNMENT_BUDGET,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
) -> HierarchyReport:
    """Place a model in the hierarchy strong => logical => probabilistic."""
    lp_result = None
    if isinstance(model, EmpiricalModel):
        lp_result = is_noncontextual(model, budget, pivot_limit)
    possibilistic = as_possibilistic(model)
    scenario = possibilistic.scenario
    support = global_support(possibilistic, budget)

    witness = None
    for facet in scenario.facets:
        extendable = {s.restrict(facet) for s in support.assignments}
        missing = [t for t in sorted_support(scenario, possibilistic.supports[facet]) if t not in extendable]
        if missing:
            witness = LocalSection(facet, missing[0])
            break

    logical = witness is not None
    strong = support.is_empty()
    probabilistic = None
    if lp_result is not None:
        probabilistic = isinstance(lp_result, Contextual)
        if logical and not probabilistic:
            raise InternalError("logically contextual model has a global distribution")
        if not probabilistic:
            witness = lp_result.weights
    return HierarchyReport(probabilistic, logical, strong, witness)


def affine_decomposition(model: EmpiricalModel, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> Dict[Assignment, Fraction]:
    """Signed weights r_s, summing to 1, with Σ r_s δ_s equal to the model.

    Only nonzero weights are returned.
    """
    candidates = global_assignments(model.scenario, budget)
    equalities = _marginal_rows(model, candidates)
    equalities.append(({i: 1 for i in range(len(candidates))}, 1))
    result = solve_linear_system(equalities, range(len(candidates)))
    if isinstance(result, NoSolution):
        raise InternalError("no affine decomposition exists for a valid model")

    weights = {candidates[i]: w for i, w in result.values.items() if w != 0}
    if sum(weights.values(), Fraction(0)) != 1 or not models_equal_table(
            model, mixture_table(model.scenario, weights)):
        raise InternalError("affine decomposition failed substitution check")
    return weights
