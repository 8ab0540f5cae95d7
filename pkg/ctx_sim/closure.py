"""Structure maps making [-, -] a closed structure on scenarios.

All maps are deterministic procedures between hom scenarios, built from
the outcome pairs <U, k> behind the hom labels. Structure predicates only
restrict which procedures count as morphisms; they never change the maps,
so every function here accepts a bare Scenario or a ScenarioWithPredicate.
"""

import logging
from typing import Dict, Union

from .errors import ScenarioMismatch
from .hom import (
    HomScenario,
    ScenarioWithPredicate,
    assignment_to_procedure,
    hom_scenario,
    procedure_to_assignment,
)
from .models import DEFAULT_HOM_OUTCOME_BUDGET, DEFAULT_PROCEDURE_BUDGET
from .procedure import (
    DeterministicProcedure,
    LocalTable,
    ProbabilisticProcedure,
    canonicalize,
    compose,
    enumerate_deterministic_procedures,
    make_probabilistic_procedure,
    procedure_from_tables,
)
from .scenario import EMPTY_ASSIGNMENT, Assignment, Scenario, ZERO
from .utils import check_budget

logger = logging.getLogger(__name__)

AnyScenario = Union[Scenario, ScenarioWithPredicate]
Morphism = Union[DeterministicProcedure, ProbabilisticProcedure]


def _bare(scenario: AnyScenario) -> Scenario:
    return scenario.scenario if isinstance(scenario, ScenarioWithPredicate) else scenario


def _constant(outcome: str) -> LocalTable:
    return LocalTable(frozenset(), ((EMPTY_ASSIGNMENT, outcome),))


def _singleton_rows(scenario: Scenario, measurement: str):
    return scenario.iter_assignments([measurement])


def _glue(hom: HomScenario, family: Dict[str, LocalTable], inner: LocalTable,
          budget: int) -> LocalTable:
    """<union of U_y, inner . <k_y . rho_y>>: run each k_y on the union, then the inner table."""
    used = frozenset().union(*(value.subset for value in family.values()))
    check_budget("glued table rows", hom.source.count_assignments(used), budget)
    order = sorted(family)
    rows = tuple(
        (p, inner.lookup[Assignment(tuple((y, family[y](p)) for y in order))])
        for p in hom.source.iter_assignments(used)
    )
    return LocalTable(used, rows)


def unit_iso_i(scenario: AnyScenario) -> DeterministicProcedure:
    """i: S -> [Zero, S], wrapping each outcome o as the constant <{}, o>."""
    s = _bare(scenario)
    target = hom_scenario(ZERO, s).base
    tables = {
        x: LocalTable(frozenset([x]), tuple((a, _constant(a[x]).label()) for a in _singleton_rows(s, x)))
        for x in s.measurements
    }
    return procedure_from_tables(s, target, tables)


def unit_iso_inverse(scenario: AnyScenario) -> DeterministicProcedure:
    """The inverse of i: [Zero, S] -> S."""
    s = _bare(scenario)
    hom = hom_scenario(ZERO, s)
    tables = {
        x: LocalTable(frozenset([x]), tuple((a, hom.outcome(x, a[x]).rows[0][1])
                                            for a in _singleton_rows(hom.base, x)))
        for x in s.measurements
    }
    return procedure_from_tables(hom.base, s, tables)


def identity_name_j(scenario: AnyScenario) -> DeterministicProcedure:
    """j: Zero -> [S, S], naming the identity of every measurement."""
    s = _bare(scenario)
    target = hom_scenario(s, s).base
    tables = {}
    for x in s.measurements:
        identity = LocalTable(frozenset([x]), tuple((a, a[x]) for a in _singleton_rows(s, x)))
        tables[x] = _constant(identity.label())
    return procedure_from_tables(ZERO, target, tables)


def hom_post(procedure: Morphism, scenario: AnyScenario,
             budget: int = DEFAULT_HOM_OUTCOME_BUDGET) -> Morphism:
    """[id, f]: [P, S] -> [P, T], post-composing with f's tables."""
    if isinstance(procedure, ProbabilisticProcedure):
        return make_probabilistic_procedure((w, hom_post(f, scenario, budget)) for w, f in procedure.components)
    p = _bare(scenario)
    before = hom_scenario(p, procedure.source, budget)
    after = hom_scenario(p, procedure.target, budget)
    tables = {}
    for x in procedure.target.measurements:
        query = procedure.query(x)
        check_budget(f"families for {x!r}", before.base.count_assignments(query), budget)
        rows = tuple(
            (fam, _glue(before, before.family(fam), procedure.local(x), budget).label())
            for fam in before.base.iter_assignments(query)
        )
        tables[x] = LocalTable(query, rows)
    return procedure_from_tables(before.base, after.base, tables)


def hom_pre(procedure: Morphism, scenario: AnyScenario,
            budget: int = DEFAULT_HOM_OUTCOME_BUDGET) -> Morphism:
    """[f, id]: [T, P] -> [S, P], pre-composing with f."""
    if isinstance(procedure, ProbabilisticProcedure):
        return make_probabilistic_procedure((w, hom_pre(f, scenario, budget)) for w, f in procedure.components)
    p = _bare(scenario)
    before = hom_scenario(procedure.target, p, budget)
    after = hom_scenario(procedure.source, p, budget)
    tables = {}
    for x in p.measurements:
        rows = []
        for a in _singleton_rows(before.base, x):
            k = before.outcome(x, a[x])
            image = procedure.image(k.subset)
            check_budget("precomposed table rows", procedure.source.count_assignments(image), budget)
            composite = tuple(
                (s, k.lookup[procedure.apply(k.subset, s)]) for s in procedure.source.iter_assignments(image)
            )
            rows.append((a, LocalTable(image, composite).label()))
        tables[x] = LocalTable(frozenset([x]), tuple(rows))
    return procedure_from_tables(before.base, after.base, tables)


def hom_map(first: Morphism, second: Morphism, budget: int = DEFAULT_HOM_OUTCOME_BUDGET) -> Morphism:
    """[f, g]: [T, P] -> [S, Q] for f: S -> T and g: P -> Q, as [id, g] . [f, id]."""
    return compose(hom_pre(first, second.source, budget), hom_post(second, first.source, budget))


def composition_L(p: AnyScenario, s: AnyScenario, t: AnyScenario,
                  budget: int = DEFAULT_HOM_OUTCOME_BUDGET) -> DeterministicProcedure:
    """L: [S, T] -> [[P, S], [P, T]], internalizing composition."""
    p, s, t = _bare(p), _bare(s), _bare(t)
    source = hom_scenario(s, t, budget)
    inner = hom_scenario(p, s, budget)
    target = hom_scenario(inner.base, hom_scenario(p, t, budget).base, budget)
    tables = {}
    for x in t.measurements:
        rows = []
        for a in _singleton_rows(source.base, x):
            k = source.outcome(x, a[x])
            check_budget("families", inner.base.count_assignments(k.subset), budget)
            lifted = tuple(
                (fam, _glue(inner, inner.family(fam), k, budget).label())
                for fam in inner.base.iter_assignments(k.subset)
            )
            rows.append((a, LocalTable(k.subset, lifted).label()))
        tables[x] = LocalTable(frozenset([x]), tuple(rows))
    return procedure_from_tables(source.base, target.base, tables)


def name(procedure: Morphism) -> Morphism:
    """The point Zero -> [S, T] of a procedure S -> T."""
    if isinstance(procedure, ProbabilisticProcedure):
        return make_probabilistic_procedure((w, name(f)) for w, f in procedure.components)
    target = hom_scenario(procedure.source, procedure.target).base
    tables = {x: _constant(local.label()) for x, local in procedure.tables}
    return procedure_from_tables(ZERO, target, tables)


def unname(point: DeterministicProcedure, source: AnyScenario, target: AnyScenario) -> DeterministicProcedure:
    """Recover S -> T from its point Zero -> [S, T]."""
    hom = hom_scenario(_bare(source), _bare(target))
    if point.source != ZERO or point.target != hom.base:
        raise ScenarioMismatch("not a point of the hom scenario")
    return assignment_to_procedure(hom, point.apply_global(EMPTY_ASSIGNMENT))


# Axiom checks, comparing canonical forms

def check_cc1(s: AnyScenario, t: AnyScenario) -> bool:
    """L . j_S = j_[T,S] as maps Zero -> [[T,S],[T,S]]."""
    left = compose(identity_name_j(s), composition_L(t, s, s))
    right = identity_name_j(hom_scenario(_bare(t), _bare(s)).base)
    return canonicalize(left) == canonicalize(right)


def check_cc2(s: AnyScenario, t: AnyScenario) -> bool:
    """[j_S, id] . L = i_[S,T] as maps [S,T] -> [Zero,[S,T]]."""
    hom = hom_scenario(_bare(s), _bare(t)).base
    left = compose(composition_L(s, s, t), hom_pre(identity_name_j(s), hom))
    return canonicalize(left) == canonicalize(unit_iso_i(hom))


def check_cc5(s: AnyScenario, t: AnyScenario, budget: int = DEFAULT_PROCEDURE_BUDGET) -> bool:
    """Naming is a bijection between procedures S -> T and accepted points of [S, T].

    Also checks the closed form of name against the composite [id, f] . j_S.
    """
    source, target = _bare(s), _bare(t)
    hom = hom_scenario(source, target)
    j = identity_name_j(source)
    points = set()
    count = 0
    for f in enumerate_deterministic_procedures(source, target, canonical=False, budget=budget):
        point = name(f)
        if point != compose(j, hom_post(f, source)):
            logger.info(f"Closed-form name differs from the composite at {procedure_to_assignment(f)}")
            return False
        if unname(point, source, target) != f:
            return False
        points.add(point)
        count += 1
    accepted = sum(
        1 for a in hom.base.iter_assignments(hom.base.measurements)
        if all(hom.accepts(facet, a.restrict(facet)) for facet in hom.base.facets)
    )
    logger.debug(f"{count} procedures, {len(points)} distinct points, {accepted} accepted assignments")
    return len(points) == count == accepted
