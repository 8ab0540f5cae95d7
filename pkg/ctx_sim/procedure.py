"""Procedures between scenarios and the pushforward of models along them.

A deterministic procedure S -> T answers each measurement x of T by querying
a set of measurements pi(x) of S and translating the joint outcome through a
lookup table alpha_x. Probabilistic procedures are convex mixtures of
deterministic ones, possibilistic procedures are Boolean mixtures.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .empirical import (
    AnyModel,
    EmpiricalModel,
    PossibilisticModel,
    Table,
    _push,
    as_possibilistic,
    make_empirical_model,
    make_possibilistic_model,
    marginal,
    possibilistic_leq,
    weighted_sum,
)
from .errors import (
    CodomainViolation,
    EmptyCollection,
    IncompleteTable,
    InternalError,
    InvalidAssignment,
    NegativeWeight,
    NotAContext,
    NotNormalized,
    NotSimplicial,
    ScenarioMismatch,
    UnknownMeasurement,
    ValidationError,
)
from .exactlp import Feasible, make_linear_system, solve_feasibility
from .models import DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_PIVOT_LIMIT, DEFAULT_PROCEDURE_BUDGET, MODES
from .scenario import (
    EMPTY_ASSIGNMENT,
    Assignment,
    Context,
    Scenario,
    ZERO,
    _measurement_renaming,
    dice_scenario,
    relabel_scenario,
)
from .utils import check_budget, context_key, format_context, format_rational, parse_rational, subsets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalTable:
    """A pair <U, alpha>: source measurements U and a table Ev(U) -> outcomes.

    Rows are stored in the enumeration order of Ev(U).
    """
    subset: Context
    rows: Tuple[Tuple[Assignment, str], ...]

    @cached_property
    def lookup(self) -> Dict[Assignment, str]:
        return dict(self.rows)

    def __call__(self, assignment: Assignment) -> str:
        return self.lookup[assignment.restrict(self.subset)]

    def label(self) -> str:
        """Canonical text form, e.g. ``U=a,b|table=00>0;01>1;10>1;11>0``."""
        rows = ";".join("".join(o for _, o in s.items) + ">" + out for s, out in self.rows)
        return f"U={','.join(context_key(self.subset))}|table={rows}"

    def sort_key(self, outcomes: Sequence[str]) -> Tuple:
        position = {o: i for i, o in enumerate(outcomes)}
        return (len(self.subset), context_key(self.subset), tuple(position[out] for _, out in self.rows))


@dataclass(frozen=True)
class DeterministicProcedure:
    """Queries pi(x) and tables alpha_x, one per target measurement x."""
    source: Scenario
    target: Scenario
    tables: Tuple[Tuple[str, LocalTable], ...]

    @cached_property
    def _tables(self) -> Dict[str, LocalTable]:
        return dict(self.tables)

    def local(self, measurement: str) -> LocalTable:
        return self._tables[measurement]

    def query(self, measurement: str) -> Context:
        """pi(x)."""
        return self._tables[measurement].subset

    def image(self, context: Iterable[str]) -> Context:
        """pi(sigma), the union of the queries of the members of sigma."""
        return frozenset().union(*(self._tables[x].subset for x in context))

    def translate(self, measurement: str, assignment: Assignment) -> str:
        """alpha_x applied to (the restriction of) a source assignment."""
        return self._tables[measurement](assignment)

    def apply(self, context: Iterable[str], assignment: Assignment) -> Assignment:
        """alpha_sigma: joint target outcome on sigma from a source assignment covering pi(sigma)."""
        return Assignment(tuple((x, self._tables[x](assignment)) for x in context_key(context)))

    def apply_global(self, assignment: Assignment) -> Assignment:
        return self.apply(self.target.measurements, assignment)

    def sort_key(self) -> Tuple:
        return tuple(
            self._tables[x].sort_key(self.target.outcomes(x)) for x in self.target.measurements
        )

    @property
    def components(self) -> Tuple[Tuple[Fraction, "DeterministicProcedure"], ...]:
        return ((Fraction(1), self),)


@dataclass(frozen=True)
class ProbabilisticProcedure:
    """Convex mixture of deterministic procedures with positive weights."""
    components: Tuple[Tuple[Fraction, DeterministicProcedure], ...]

    @property
    def source(self) -> Scenario:
        return self.components[0][1].source

    @property
    def target(self) -> Scenario:
        return self.components[0][1].target


@dataclass(frozen=True)
class PossibilisticProcedure:
    """Boolean mixture of deterministic procedures."""
    members: Tuple[DeterministicProcedure, ...]

    @property
    def source(self) -> Scenario:
        return self.members[0].source

    @property
    def target(self) -> Scenario:
        return self.members[0].target


Procedure = Union[DeterministicProcedure, ProbabilisticProcedure, PossibilisticProcedure]


def make_local_table(source: Scenario, target: Scenario, measurement: str,
                     subset: Iterable[str], table: Any) -> LocalTable:
    """Validate one (pi(x), alpha_x) pair.

    ``table`` is a mapping from assignments (Assignment or dict) to outcome
    labels, or an iterable of such pairs.
    """
    subset = source.check_measurements(subset)
    codomain = target.outcomes(measurement)
    pairs = table.items() if isinstance(table, Mapping) else table
    given: Dict[Assignment, str] = {}
    for key, out in pairs:
        assignment = key if isinstance(key, Assignment) else Assignment.of(dict(key))
        if assignment.domain != subset:
            raise IncompleteTable(
                f"table for {measurement!r} has row {assignment} outside Ev({format_context(subset)})"
            )
        if assignment in given:
            raise IncompleteTable(f"table for {measurement!r} lists {assignment} twice")
        if out not in codomain:
            raise CodomainViolation(f"table for {measurement!r} outputs {out!r}, not an outcome of it")
        given[assignment] = out
    rows = []
    for s in source.iter_assignments(subset):
        if s not in given:
            raise IncompleteTable(f"table for {measurement!r} has no row for {s}")
        rows.append((s, given[s]))
    if len(rows) != len(given):
        covered = {s for s, _ in rows}
        extra = next(a for a in given if a not in covered)
        raise InvalidAssignment(f"table for {measurement!r} has row {extra} with unknown outcomes")
    return LocalTable(subset, tuple(rows))


def make_deterministic_procedure(
    source: Scenario,
    target: Scenario,
    pi: Mapping[str, Iterable[str]],
    alpha: Mapping[str, Any],
) -> DeterministicProcedure:
    """Validate a raw (pi, alpha) pair into a procedure."""
    tables = {}
    for x, subset in pi.items():
        target.outcomes(x)
        if x not in alpha:
            raise IncompleteTable(f"no table for target measurement {x!r}")
        tables[x] = make_local_table(source, target, x, subset, alpha[x])
    return procedure_from_tables(source, target, tables)


def procedure_from_tables(source: Scenario, target: Scenario,
                          tables: Mapping[str, LocalTable]) -> DeterministicProcedure:
    """Assemble validated local tables, checking coverage and simpliciality."""
    missing = target.measurement_set - set(tables)
    if missing:
        raise IncompleteTable(f"no query for target measurements {format_context(missing)}")
    extra = set(tables) - target.measurement_set
    if extra:
        raise UnknownMeasurement(f"queries given for unknown target measurements {format_context(extra)}")
    for x, local in tables.items():
        codomain = set(target.outcomes(x))
        if any(out not in codomain for _, out in local.rows):
            raise CodomainViolation(f"table for {x!r} leaves the outcomes of {x!r}")
    for facet in target.facets:
        image = frozenset().union(*(tables[x].subset for x in facet))
        if not source.is_context(image):
            raise NotSimplicial(facet, image)
    return DeterministicProcedure(source, target, tuple((x, tables[x]) for x in target.measurements))


def make_probabilistic_procedure(components: Iterable[Tuple[Any, DeterministicProcedure]]) -> ProbabilisticProcedure:
    """Validate a convex mixture; equal components are merged."""
    merged: Dict[DeterministicProcedure, Fraction] = {}
    order: List[DeterministicProcedure] = []
    for weight, procedure in components:
        w = parse_rational(weight)
        if w <= 0:
            raise NegativeWeight(f"mixture weights must be positive, got {format_rational(w)}")
        if procedure not in merged:
            merged[procedure] = Fraction(0)
            order.append(procedure)
        merged[procedure] += w
    if not order:
        raise EmptyCollection("a mixture needs at least one component")
    _check_endpoints(order)
    total = sum(merged.values(), Fraction(0))
    if total != 1:
        raise NotNormalized(f"mixture weights sum to {format_rational(total)}")
    return ProbabilisticProcedure(tuple((merged[f], f) for f in order))


def make_possibilistic_procedure(members: Iterable[DeterministicProcedure]) -> PossibilisticProcedure:
    unique = sorted(set(members), key=DeterministicProcedure.sort_key)
    if not unique:
        raise EmptyCollection("a Boolean mixture needs at least one component")
    _check_endpoints(unique)
    return PossibilisticProcedure(tuple(unique))


def _check_endpoints(procedures: Sequence[DeterministicProcedure]) -> None:
    first = procedures[0]
    for f in procedures[1:]:
        if f.source != first.source or f.target != first.target:
            raise ScenarioMismatch("mixture components have different endpoints")


def as_mixture(procedure: Union[DeterministicProcedure, ProbabilisticProcedure]) -> ProbabilisticProcedure:
    if isinstance(procedure, DeterministicProcedure):
        return ProbabilisticProcedure(((Fraction(1), procedure),))
    if isinstance(procedure, PossibilisticProcedure):
        raise ValidationError("a Boolean mixture has no probabilistic weights")
    return procedure


def support_of(procedure: Procedure) -> PossibilisticProcedure:
    """The Boolean mixture of a procedure's components."""
    if isinstance(procedure, PossibilisticProcedure):
        return procedure
    if isinstance(procedure, DeterministicProcedure):
        return PossibilisticProcedure((procedure,))
    return make_possibilistic_procedure(f for _, f in procedure.components)


# Named procedures

def identity_procedure(scenario: Scenario) -> DeterministicProcedure:
    tables = {
        x: LocalTable(frozenset([x]), tuple((s, s[x]) for s in scenario.iter_assignments([x])))
        for x in scenario.measurements
    }
    return procedure_from_tables(scenario, scenario, tables)


def global_assignment_procedure(scenario: Scenario, assignment: Assignment) -> DeterministicProcedure:
    """The procedure Zero -> S that answers every measurement with s."""
    if assignment.domain != scenario.measurement_set:
        raise InvalidAssignment(f"{assignment} is not a global assignment")
    scenario.validate_assignment(assignment)
    tables = {x: LocalTable(frozenset(), ((EMPTY_ASSIGNMENT, assignment[x]),)) for x in scenario.measurements}
    return procedure_from_tables(ZERO, scenario, tables)


def relabelling(
    scenario: Scenario,
    measurement_map: Optional[Mapping[str, str]] = None,
    outcome_map: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> DeterministicProcedure:
    """The isomorphism from a scenario onto its relabelled copy."""
    target = relabel_scenario(scenario, measurement_map, outcome_map)
    renamed = _measurement_renaming(scenario, measurement_map)
    outcome_map = outcome_map or {}
    tables = {}
    for x in scenario.measurements:
        relabel = outcome_map.get(x, {})
        rows = tuple((s, relabel.get(s[x], s[x])) for s in scenario.iter_assignments([x]))
        tables[renamed[x]] = LocalTable(frozenset([x]), rows)
    return procedure_from_tables(scenario, target, tables)


# Pushforward

def _push_table(procedure: DeterministicProcedure, model: EmpiricalModel) -> Table:
    table = {}
    for facet in procedure.target.facets:
        dist = marginal(model, procedure.image(facet))
        table[facet] = _push(dist.weights, lambda s, facet=facet: procedure.apply(facet, s))
    return table


def _push_supports(procedure: DeterministicProcedure, model: PossibilisticModel) -> Dict[Context, FrozenSet[Assignment]]:
    return {
        facet: frozenset(procedure.apply(facet, s) for s in model.marginal(procedure.image(facet)))
        for facet in procedure.target.facets
    }


def pushforward(procedure: Procedure, model: AnyModel) -> AnyModel:
    """EMP(f) applied to a model.

    Probabilistic models along deterministic or probabilistic procedures give
    probabilistic models; anything involving a possibilistic side is computed
    on supports.
    """
    if model.scenario != procedure.source:
        raise ScenarioMismatch("model does not live on the procedure's source")
    if isinstance(model, EmpiricalModel) and not isinstance(procedure, PossibilisticProcedure):
        if isinstance(procedure, DeterministicProcedure):
            return make_empirical_model(procedure.target, _push_table(procedure, model))
        terms = [(w, make_empirical_model(f.target, _push_table(f, model))) for w, f in procedure.components]
        return make_empirical_model(procedure.target, weighted_sum(terms))

    support = as_possibilistic(model)
    images = [_push_supports(f, support) for f in support_of(procedure).members]
    return make_possibilistic_model(
        procedure.target,
        {facet: frozenset().union(*(image[facet] for image in images)) for facet in procedure.target.facets},
    )


# Composition

def compose(first: Procedure, second: Procedure) -> Procedure:
    """second after first: for f: S -> T and g: T -> V, returns g . f : S -> V."""
    if first.target != second.source:
        raise ScenarioMismatch("cannot compose: endpoint scenarios differ")
    if isinstance(first, DeterministicProcedure) and isinstance(second, DeterministicProcedure):
        return _compose_deterministic(first, second)
    if isinstance(first, PossibilisticProcedure) or isinstance(second, PossibilisticProcedure):
        return make_possibilistic_procedure(
            _compose_deterministic(f, g)
            for f in support_of(first).members
            for g in support_of(second).members
        )
    return make_probabilistic_procedure(
        (r * s, _compose_deterministic(f, g))
        for r, f in as_mixture(first).components
        for s, g in as_mixture(second).components
    )


def _compose_deterministic(f: DeterministicProcedure, g: DeterministicProcedure) -> DeterministicProcedure:
    tables = {}
    for v in g.target.measurements:
        middle = context_key(g.query(v))
        subset = f.image(middle)
        inner = g.local(v)
        rows = tuple(
            (s, inner.lookup[Assignment(tuple((y, f.translate(y, s)) for y in middle))])
            for s in f.source.iter_assignments(subset)
        )
        tables[v] = LocalTable(subset, rows)
    return procedure_from_tables(f.source, g.target, tables)


# Least subsets and canonical forms

def _vary(assignment: Assignment, measurement: str, outcome: str) -> Assignment:
    return Assignment(tuple((x, outcome if x == measurement else o) for x, o in assignment.items))


def least_subset(source: Scenario, table: Mapping[Assignment, Any],
                 budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> Context:
    """The least U such that the table factors through Ev(U).

    ``table`` must be total on Ev(D) for some D within the source's
    measurements; D is read off its keys.
    """
    if not table:
        raise IncompleteTable("empty table")
    domain = next(iter(table)).domain
    source.check_measurements(domain)
    check_budget("table rows", source.count_assignments(domain), budget)
    if len(table) != source.count_assignments(domain) or any(s not in table for s in source.iter_assignments(domain)):
        raise IncompleteTable(f"table is not total on Ev({format_context(domain)})")

    essential = set()
    for s, value in table.items():
        for x in context_key(domain):
            if x in essential:
                continue
            if any(table[_vary(s, x, o)] != value for o in source.outcomes(x) if o != s[x]):
                essential.add(x)
    result = frozenset(essential)

    if not _factors_through(table, result):
        raise InternalError(f"table does not factor through {format_context(result)}")
    for x in result:
        if _factors_through(table, result - {x}):
            raise InternalError(f"{format_context(result)} is not least: {x} is redundant")
    return result


def _factors_through(table: Mapping[Assignment, Any], subset: Context) -> bool:
    seen: Dict[Assignment, Any] = {}
    for s, value in table.items():
        key = s.restrict(subset)
        if seen.setdefault(key, value) != value:
            return False
    return True


def shrink_local(source: Scenario, local: LocalTable) -> LocalTable:
    """Restrict a local table to the least subset it depends on."""
    subset = least_subset(source, local.lookup)
    if subset == local.subset:
        return local
    values = {s.restrict(subset): out for s, out in local.rows}
    return LocalTable(subset, tuple((s, values[s]) for s in source.iter_assignments(subset)))


def canonicalize(procedure: Procedure) -> Procedure:
    """Shrink every query to its least subset; merge equal mixture components."""
    if isinstance(procedure, DeterministicProcedure):
        tables = {x: shrink_local(procedure.source, local) for x, local in procedure.tables}
        return procedure_from_tables(procedure.source, procedure.target, tables)
    if isinstance(procedure, PossibilisticProcedure):
        return make_possibilistic_procedure(canonicalize(f) for f in procedure.members)
    merged = make_probabilistic_procedure((w, canonicalize(f)) for w, f in procedure.components)
    return ProbabilisticProcedure(tuple(sorted(merged.components, key=lambda c: c[1].sort_key())))


def is_canonical(procedure: DeterministicProcedure) -> bool:
    return all(shrink_local(procedure.source, local) == local for _, local in procedure.tables)


def experiment_from_table(source: Scenario, table: Mapping[Assignment, Any], n: int,
                          budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> DeterministicProcedure:
    """The deterministic experiment S -> dice(n) computing a function of global assignments.

    Exists exactly when the function's least subset is a context.
    """
    labels = {s: str(v) for s, v in table.items()}
    if next(iter(labels)).domain != source.measurement_set:
        raise IncompleteTable("table must be defined on global assignments")
    subset = least_subset(source, labels, budget)
    if not source.is_context(subset):
        raise NotAContext(f"the function depends on {format_context(subset)}, which is not a context")
    dice = dice_scenario(n)
    values = {s.restrict(subset): out for s, out in labels.items()}
    local = make_local_table(source, dice, "*", subset, values)
    return procedure_from_tables(source, dice, {"*": local})


# Simulations

def is_simulation(procedure: Procedure, source_model: AnyModel, target_model: AnyModel,
                  mode: str = "probabilistic") -> bool:
    """Whether the procedure pushes one model to (or, for weak, under) another."""
    if mode not in MODES:
        raise ValidationError(f"unknown simulation mode {mode!r}")
    if source_model.scenario != procedure.source or target_model.scenario != procedure.target:
        raise ScenarioMismatch("models do not match the procedure's endpoints")
    if mode == "probabilistic":
        if not (isinstance(source_model, EmpiricalModel) and isinstance(target_model, EmpiricalModel)):
            raise ValidationError("probabilistic simulations relate probabilistic models")
        if isinstance(procedure, PossibilisticProcedure):
            raise ValidationError("probabilistic simulations need a probabilistic procedure")
        return pushforward(procedure, source_model) == target_model
    image = pushforward(support_of(procedure), as_possibilistic(source_model))
    target_support = as_possibilistic(target_model)
    if mode == "possibilistic":
        return image == target_support
    return possibilistic_leq(image, target_support)


# Enumeration

def _faces(scenario: Scenario) -> List[Context]:
    faces = set()
    for facet in scenario.facets:
        faces.update(subsets(facet))
    return sorted(faces, key=lambda u: (len(u), context_key(u)))


def candidate_tables(source: Scenario, target: Scenario, measurement: str,
                     canonical: bool = True, budget: int = DEFAULT_PROCEDURE_BUDGET,
                     domains: Optional[Sequence[Context]] = None) -> List[LocalTable]:
    """Possible (pi(x), alpha_x) for one target measurement, in canonical order.

    Queries range over the faces of the source unless ``domains`` is given.
    """
    outcomes = target.outcomes(measurement)
    faces = _faces(source) if domains is None else list(domains)
    check_budget(
        f"tables for {measurement!r}",
        sum(len(outcomes) ** source.count_assignments(u) for u in faces),
        budget,
    )
    found = []
    for subset in faces:
        rows = source.enumerate_assignments(subset)
        for outputs in itertools.product(outcomes, repeat=len(rows)):
            local = LocalTable(subset, tuple(zip(rows, outputs)))
            if canonical and least_subset(source, local.lookup) != subset:
                continue
            found.append(local)
    return found


def _search(source: Scenario, target: Scenario, candidates: Dict[str, List[LocalTable]]) -> Iterator[List[LocalTable]]:
    xs = target.measurements
    # facets to re-check after choosing xs[k], restricted to already-chosen members
    checks = [
        [tuple(i for i, y in enumerate(xs[:k + 1]) if y in facet) for facet in target.facets if x in facet]
        for k, x in enumerate(xs)
    ]
    chosen: List[LocalTable] = []

    def extend(k: int) -> Iterator[List[LocalTable]]:
        if k == len(xs):
            yield list(chosen)
            return
        for local in candidates[xs[k]]:
            chosen.append(local)
            if all(any(frozenset().union(*(chosen[i].subset for i in members)) <= facet
                       for facet in source.facets)
                   for members in checks[k]):
                yield from extend(k + 1)
            chosen.pop()

    yield from extend(0)


def count_deterministic_procedures(source: Scenario, target: Scenario, canonical: bool = True,
                                   budget: int = DEFAULT_PROCEDURE_BUDGET) -> int:
    """Number of procedures enumerate_deterministic_procedures would yield."""
    candidates = {x: candidate_tables(source, target, x, canonical, budget) for x in target.measurements}
    count = 0
    for _ in _search(source, target, candidates):
        count += 1
        check_budget("deterministic procedures", count, budget)
    return count


def enumerate_deterministic_procedures(source: Scenario, target: Scenario, canonical: bool = True,
                                       budget: int = DEFAULT_PROCEDURE_BUDGET) -> Iterator[DeterministicProcedure]:
    """Every (canonical) deterministic procedure source -> target, in canonical order.

    The budget is checked before the first procedure is produced.
    """
    total = count_deterministic_procedures(source, target, canonical, budget)
    logger.debug(f"Enumerating {total} deterministic procedures")
    candidates = {x: candidate_tables(source, target, x, canonical, budget) for x in target.measurements}

    def stream() -> Iterator[DeterministicProcedure]:
        for chosen in _search(source, target, candidates):
            yield DeterministicProcedure(source, target, tuple(zip(target.measurements, chosen)))

    return stream()


def find_simulation(source_model: EmpiricalModel, target_model: EmpiricalModel,
                    budget: int = DEFAULT_PROCEDURE_BUDGET,
                    pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> Optional[ProbabilisticProcedure]:
    """A probabilistic procedure pushing one model exactly onto the other, if any."""
    source, target = source_model.scenario, target_model.scenario
    columns: Dict[Tuple, DeterministicProcedure] = {}
    for f in enumerate_deterministic_procedures(source, target, budget=budget):
        table = _push_table(f, source_model)
        signature = tuple((facet, tuple(sorted(table[facet].items(), key=lambda kv: target.assignment_key(kv[0]))))
                          for facet in target.facets)
        columns.setdefault(signature, f)
    procedures = list(columns.values())
    logger.debug(f"Simulation search over {len(procedures)} distinct pushforwards")

    rows = {}
    for facet in target.facets:
        for t in target.iter_assignments(facet):
            rows[(facet, t)] = ({}, target_model.distributions[facet].probability(t))
    for i, signature in enumerate(columns):
        for facet, cells in signature:
            for t, p in cells:
                rows[(facet, t)][0][i] = p
    equalities = list(rows.values())
    equalities.append(({i: 1 for i in range(len(procedures))}, 1))
    result = solve_feasibility(make_linear_system(range(len(procedures)), equalities), pivot_limit=pivot_limit)
    if not isinstance(result, Feasible):
        logger.info("No simulation exists")
        return None

    witness = make_probabilistic_procedure((w, procedures[i]) for i, w in sorted(result.point.items()) if w > 0)
    if pushforward(witness, source_model) != target_model:
        raise InternalError("simulation witness does not reproduce the target model")
    logger.info(f"Found a simulation mixing {len(witness.components)} procedures")
    return witness
