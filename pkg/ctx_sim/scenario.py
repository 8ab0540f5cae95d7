"""Measurement scenarios, their complexes of contexts, and the event sheaf.

A scenario is stored by its facets (maximal contexts). A set of measurements
is a context when it is contained in some facet, so the complex is never
materialized.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    DuplicateMeasurementId,
    DuplicateOutcome,
    EmptyOutcomeSet,
    InvalidArity,
    InvalidAssignment,
    InvalidMeasurementId,
    NotAContext,
    NotSubdomain,
    UncoveredMeasurement,
    UnknownMeasurement,
    UnknownMeasurementInContext,
)
from .utils import context_key, format_context

logger = logging.getLogger(__name__)

Context = FrozenSet[str]

DICE_MEASUREMENT = "*"


@dataclass(frozen=True)
class Assignment:
    """Outcomes for the measurements of a domain U, an element of Ev(U).

    Entries are kept sorted by measurement id.
    """
    items: Tuple[Tuple[str, str], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> "Assignment":
        return cls(tuple(sorted(mapping.items())))

    @cached_property
    def domain(self) -> Context:
        return frozenset(x for x, _ in self.items)

    def __getitem__(self, measurement: str) -> str:
        for x, outcome in self.items:
            if x == measurement:
                return outcome
        raise KeyError(measurement)

    def __len__(self) -> int:
        return len(self.items)

    def __str__(self) -> str:
        return "{" + ",".join(f"{x}={o}" for x, o in self.items) + "}"

    def as_dict(self) -> Dict[str, str]:
        return dict(self.items)

    def restrict(self, subdomain: Iterable[str]) -> "Assignment":
        keep = frozenset(subdomain)
        if not keep <= self.domain:
            raise NotSubdomain(
                f"cannot restrict {self} to {format_context(keep)}: "
                f"not a subset of its domain"
            )
        if len(keep) == len(self.items):
            return self
        return Assignment(tuple(item for item in self.items if item[0] in keep))

    def merge(self, other: "Assignment") -> "Assignment":
        """Glue two assignments that agree where both are defined."""
        combined = dict(self.items)
        for x, outcome in other.items:
            if combined.setdefault(x, outcome) != outcome:
                raise InvalidAssignment(f"{self} and {other} disagree at {x}")
        return Assignment.of(combined)


EMPTY_ASSIGNMENT = Assignment()


@dataclass(frozen=True)
class Scenario:
    """Measurements, their outcome sets, and the facets of the context complex."""
    measurements: Tuple[str, ...]
    outcome_sets: Tuple[Tuple[str, ...], ...]
    facets: Tuple[Context, ...]

    @cached_property
    def _outcomes(self) -> Dict[str, Tuple[str, ...]]:
        return dict(zip(self.measurements, self.outcome_sets))

    @cached_property
    def _positions(self) -> Dict[str, Dict[str, int]]:
        return {
            x: {o: i for i, o in enumerate(outcomes)}
            for x, outcomes in zip(self.measurements, self.outcome_sets)
        }

    @cached_property
    def measurement_set(self) -> Context:
        return frozenset(self.measurements)

    @property
    def is_zero(self) -> bool:
        return not self.measurements

    def outcomes(self, measurement: str) -> Tuple[str, ...]:
        try:
            return self._outcomes[measurement]
        except KeyError:
            raise UnknownMeasurement(f"unknown measurement {measurement!r}")

    def outcome_position(self, measurement: str, outcome: str) -> int:
        try:
            return self._positions[measurement][outcome]
        except KeyError:
            self.outcomes(measurement)
            raise InvalidAssignment(f"{outcome!r} is not an outcome of {measurement!r}")

    def check_measurements(self, measurements: Iterable[str]) -> Context:
        """Return ``measurements`` as a frozenset, rejecting unknown ids."""
        subset = frozenset(measurements)
        unknown = subset - self.measurement_set
        if unknown:
            raise UnknownMeasurement(f"unknown measurements {format_context(unknown)}")
        return subset

    def is_context(self, measurements: Iterable[str]) -> bool:
        subset = self.check_measurements(measurements)
        return any(subset <= facet for facet in self.facets)

    def facets_containing(self, measurements: Iterable[str]) -> List[Context]:
        subset = frozenset(measurements)
        return [facet for facet in self.facets if subset <= facet]

    def count_assignments(self, measurements: Iterable[str]) -> int:
        subset = self.check_measurements(measurements)
        return prod(len(self._outcomes[x]) for x in subset)

    def iter_assignments(self, measurements: Iterable[str]) -> Iterator[Assignment]:
        """Ev(U) in lexicographic order of (measurement id, outcome position)."""
        ordered = context_key(self.check_measurements(measurements))
        for labels in itertools.product(*(self._outcomes[x] for x in ordered)):
            yield Assignment(tuple(zip(ordered, labels)))

    def enumerate_assignments(self, measurements: Iterable[str]) -> List[Assignment]:
        return list(self.iter_assignments(measurements))

    def assignment_key(self, assignment: Assignment) -> Tuple:
        """Sort key placing assignments in enumeration order."""
        return tuple((x, self._positions[x][o]) for x, o in assignment.items)

    def make_assignment(self, mapping: Mapping[str, str]) -> Assignment:
        """Validated assignment over the keys of ``mapping``."""
        for x, outcome in mapping.items():
            if x not in self._outcomes:
                raise InvalidAssignment(f"unknown measurement {x!r} in assignment")
            if outcome not in self._positions[x]:
                raise InvalidAssignment(f"{outcome!r} is not an outcome of {x!r}")
        return Assignment.of(mapping)

    def validate_assignment(self, assignment: Assignment, domain: Optional[Context] = None) -> None:
        if domain is not None and assignment.domain != domain:
            raise InvalidAssignment(
                f"{assignment} is not an assignment on {format_context(domain)}"
            )
        self.make_assignment(assignment.as_dict())

    def __str__(self) -> str:
        facets = " ".join(format_context(f) for f in self.facets)
        return f"Scenario({len(self.measurements)} measurements; facets {facets})"


def make_scenario(
    measurements: Sequence[str],
    outcomes: Mapping[str, Sequence[str]],
    maximal_contexts: Iterable[Iterable[str]],
) -> Scenario:
    """Validate raw data into a Scenario with antichain facet storage."""
    ids = list(measurements)
    for x in ids:
        if not isinstance(x, str) or not x:
            raise InvalidMeasurementId(f"measurement ids must be non-empty strings, got {x!r}")
    if len(set(ids)) != len(ids):
        duplicates = sorted({x for x in ids if ids.count(x) > 1})
        raise DuplicateMeasurementId(f"duplicate measurement ids: {', '.join(duplicates)}")
    declared = frozenset(ids)

    extra = set(outcomes) - declared
    if extra:
        raise UnknownMeasurement(f"outcomes given for undeclared measurements {format_context(extra)}")

    ordered = sorted(ids)
    outcome_sets = []
    for x in ordered:
        labels = tuple(outcomes.get(x, ()))
        if not labels:
            raise EmptyOutcomeSet(f"measurement {x!r} has no outcomes")
        if len(set(labels)) != len(labels):
            raise DuplicateOutcome(f"measurement {x!r} lists an outcome twice")
        for label in labels:
            if not isinstance(label, str):
                raise InvalidAssignment(f"outcome labels must be strings, got {label!r}")
        outcome_sets.append(labels)

    contexts = set()
    for raw in maximal_contexts:
        context = frozenset(raw)
        unknown = context - declared
        if unknown:
            raise UnknownMeasurementInContext(
                f"context {format_context(context)} mentions undeclared {format_context(unknown)}"
            )
        contexts.add(context)
    if not contexts:
        contexts.add(frozenset())

    # subsumed faces are dropped silently
    facets = [c for c in contexts if not any(c < other for other in contexts)]
    facets.sort(key=context_key)

    covered = frozenset().union(*facets)
    uncovered = declared - covered
    if uncovered:
        raise UncoveredMeasurement(f"measurements in no context: {format_context(uncovered)}")

    scenario = Scenario(tuple(ordered), tuple(outcome_sets), tuple(facets))
    logger.debug(f"Built {scenario}")
    return scenario


ZERO = make_scenario([], {}, [[]])


def dice_scenario(n: int) -> Scenario:
    """One measurement "*" with outcomes "0".."n-1"."""
    if n < 1:
        raise InvalidArity(f"dice scenarios need at least one outcome, got {n}")
    return make_scenario(
        [DICE_MEASUREMENT],
        {DICE_MEASUREMENT: [str(i) for i in range(n)]},
        [[DICE_MEASUREMENT]],
    )


def dice_size(scenario: Scenario) -> Optional[int]:
    """n when ``scenario`` is exactly dice(n), otherwise None."""
    if scenario.measurements != (DICE_MEASUREMENT,):
        return None
    n = len(scenario.outcome_sets[0])
    return n if scenario == dice_scenario(n) else None


def is_context(scenario: Scenario, measurements: Iterable[str]) -> bool:
    return scenario.is_context(measurements)


def enumerate_assignments(scenario: Scenario, measurements: Iterable[str]) -> List[Assignment]:
    return scenario.enumerate_assignments(measurements)


def restrict_assignment(assignment: Assignment, subdomain: Iterable[str]) -> Assignment:
    return assignment.restrict(subdomain)


def make_assignment(scenario: Scenario, mapping: Mapping[str, str]) -> Assignment:
    return scenario.make_assignment(mapping)


def restrict_scenario(scenario: Scenario, context: Iterable[str]) -> Scenario:
    """The single-facet scenario on a context."""
    sigma = frozenset(context)
    if not scenario.is_context(sigma):
        raise NotAContext(f"{format_context(sigma)} is not a context")
    return make_scenario(
        sorted(sigma),
        {x: scenario.outcomes(x) for x in sigma},
        [sorted(sigma)],
    )


def relabel_scenario(
    scenario: Scenario,
    measurement_map: Optional[Mapping[str, str]] = None,
    outcome_map: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> Scenario:
    """Rename measurements and outcome labels.

    ``measurement_map`` sends old ids to new ids; ``outcome_map`` is keyed by
    old ids. Anything not mentioned keeps its name.
    """
    renamed = _measurement_renaming(scenario, measurement_map)
    outcome_map = outcome_map or {}
    scenario.check_measurements(outcome_map)
    outcomes = {}
    for x in scenario.measurements:
        relabel = outcome_map.get(x, {})
        unknown = set(relabel) - set(scenario.outcomes(x))
        if unknown:
            raise InvalidAssignment(f"outcome map for {x!r} mentions unknown outcomes {sorted(unknown)}")
        labels = [relabel.get(o, o) for o in scenario.outcomes(x)]
        if len(set(labels)) != len(labels):
            raise DuplicateOutcome(f"outcome map for {x!r} is not injective")
        outcomes[renamed[x]] = labels
    return make_scenario(
        [renamed[x] for x in scenario.measurements],
        outcomes,
        [[renamed[x] for x in facet] for facet in scenario.facets],
    )


def _measurement_renaming(scenario: Scenario, measurement_map: Optional[Mapping[str, str]]) -> Dict[str, str]:
    measurement_map = measurement_map or {}
    scenario.check_measurements(measurement_map)
    renamed = {x: measurement_map.get(x, x) for x in scenario.measurements}
    if len(set(renamed.values())) != len(renamed):
        raise DuplicateMeasurementId("measurement map is not injective")
    return renamed
