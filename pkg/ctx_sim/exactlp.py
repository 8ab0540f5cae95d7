"""Exact rational linear feasibility and linear-system solving.

Feasibility runs phase I of the simplex method on a sparse tableau with
Bland's rule; linear systems are solved by Gauss-Jordan elimination.
Everything is ``fractions.Fraction``; there is no tolerance anywhere.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InternalError, MalformedSystem
from .models import DEFAULT_PIVOT_LIMIT
from .utils import parse_rational

logger = logging.getLogger(__name__)

Equality = Tuple[Mapping[Hashable, Fraction], Fraction]


@dataclass(frozen=True)
class LinearSystem:
    """Equalities over declared variables, some of them constrained to be >= 0."""
    variables: Tuple[Hashable, ...]
    equalities: Tuple[Equality, ...]
    nonneg: FrozenSet[Hashable]

    __hash__ = None


@dataclass(frozen=True)
class Feasible:
    point: Dict[Hashable, Fraction]

    __hash__ = None


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Solution:
    values: Dict[Hashable, Fraction]

    __hash__ = None


@dataclass(frozen=True)
class NoSolution:
    pass


def make_linear_system(
    variables: Sequence[Hashable],
    equalities: Iterable[Tuple[Mapping[Hashable, Any], Any]],
    nonneg: Optional[Iterable[Hashable]] = None,
) -> LinearSystem:
    """Validate and normalize a system. ``nonneg`` defaults to every variable."""
    variables = tuple(variables)
    declared = set(variables)
    if len(declared) != len(variables):
        raise MalformedSystem("duplicate variable ids")
    rows = []
    for coefficients, rhs in equalities:
        unknown = set(coefficients) - declared
        if unknown:
            raise MalformedSystem(f"equality mentions undeclared variables {sorted(map(str, unknown))}")
        rows.append((
            {v: parse_rational(c) for v, c in coefficients.items() if parse_rational(c) != 0},
            parse_rational(rhs),
        ))
    bounded = frozenset(variables if nonneg is None else nonneg)
    if not bounded <= declared:
        raise MalformedSystem("nonnegativity declared for undeclared variables")
    return LinearSystem(variables, tuple(rows), bounded)


def _check_system(system: LinearSystem) -> None:
    declared = set(system.variables)
    if len(declared) != len(system.variables):
        raise MalformedSystem("duplicate variable ids")
    for coefficients, _ in system.equalities:
        if not set(coefficients) <= declared:
            raise MalformedSystem("equality mentions undeclared variables")
    if not system.nonneg <= declared:
        raise MalformedSystem("nonnegativity declared for undeclared variables")


def _axpy(target: Dict[int, Fraction], factor: Fraction, source: Mapping[int, Fraction]) -> None:
    """target += factor * source, dropping entries that become zero."""
    for k, v in source.items():
        value = target.get(k, 0) + factor * v
        if value:
            target[k] = value
        else:
            target.pop(k, None)


class _PhaseOneTableau:
    """Sparse full tableau for minimizing the sum of artificial variables.

    The cost row holds reduced costs; ``cost_rhs`` is minus the current
    objective value, and is updated like every other right-hand side.
    """

    def __init__(self, rows: List[Dict[int, Fraction]], rhs: List[Fraction], n_columns: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = []
        self.cost: Dict[int, Fraction] = {}
        self.cost_rhs = Fraction(0)
        for i, row in enumerate(self.rows):
            artificial = n_columns + i
            row[artificial] = Fraction(1)
            self.basis.append(artificial)
            for k, v in row.items():
                if k != artificial:
                    self.cost[k] = self.cost.get(k, 0) - v
            self.cost_rhs -= self.rhs[i]
        self.cost = {k: v for k, v in self.cost.items() if v}
        self.pivots = 0

    @property
    def objective(self) -> Fraction:
        return -self.cost_rhs

    def entering_column(self) -> Optional[int]:
        # Bland: lowest-index column with negative reduced cost
        return min((k for k, v in self.cost.items() if v < 0), default=None)

    def leaving_row(self, column: int) -> Optional[int]:
        best = None
        for i, row in enumerate(self.rows):
            a = row.get(column)
            if a is None or a <= 0:
                continue
            key = (self.rhs[i] / a, self.basis[i])
            if best is None or key < best[0]:
                best = (key, i)
        return None if best is None else best[1]

    def pivot(self, r: int, column: int) -> None:
        row = self.rows[r]
        a = row[column]
        if a != 1:
            for k in list(row):
                row[k] /= a
            self.rhs[r] /= a
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            factor = other.get(column)
            if factor:
                _axpy(other, -factor, row)
                self.rhs[i] -= factor * self.rhs[r]
        factor = self.cost.get(column)
        if factor:
            _axpy(self.cost, -factor, row)
            self.cost_rhs -= factor * self.rhs[r]
        self.basis[r] = column
        self.pivots += 1

    def run(self, pivot_limit: int) -> None:
        while True:
            column = self.entering_column()
            if column is None:
                return
            r = self.leaving_row(column)
            if r is None:
                raise InternalError("phase I objective reported unbounded")
            if self.pivots >= pivot_limit:
                raise InternalError(f"simplex exceeded {pivot_limit} pivots")
            self.pivot(r, column)

    def basic_values(self) -> Dict[int, Fraction]:
        return {column: self.rhs[i] for i, column in enumerate(self.basis)}


def solve_feasibility(system: LinearSystem, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> Union[Feasible, Infeasible]:
    """Find a point satisfying every equality and nonnegativity constraint.

    Free variables are split into a difference of two nonnegative columns.
    """
    _check_system(system)
    columns: List[Tuple[Hashable, int]] = []
    position: Dict[Hashable, List[int]] = {}
    for v in system.variables:
        position[v] = [len(columns)]
        columns.append((v, 1))
        if v not in system.nonneg:
            position[v].append(len(columns))
            columns.append((v, -1))

    rows: List[Dict[int, Fraction]] = []
    rhs: List[Fraction] = []
    for coefficients, b in system.equalities:
        sign = -1 if b < 0 else 1
        row: Dict[int, Fraction] = {}
        for v, c in coefficients.items():
            if not c:
                continue
            row[position[v][0]] = sign * c
            if len(position[v]) == 2:
                row[position[v][1]] = -sign * c
        rows.append(row)
        rhs.append(sign * b)

    tableau = _PhaseOneTableau(rows, rhs, len(columns))
    tableau.run(pivot_limit)
    logger.debug(
        f"Phase I on {len(rows)} rows x {len(columns)} columns: "
        f"{tableau.pivots} pivots, residual {tableau.objective}"
    )
    if tableau.objective > 0:
        return Infeasible()

    values = tableau.basic_values()
    point = {}
    for v in system.variables:
        cols = position[v]
        x = values.get(cols[0], Fraction(0))
        if len(cols) == 2:
            x -= values.get(cols[1], Fraction(0))
        point[v] = x
    _verify(system, point, check_nonneg=True)
    return Feasible(point)


def solve_linear_system(
    equalities: Iterable[Tuple[Mapping[Hashable, Any], Any]],
    variables: Sequence[Hashable],
) -> Union[Solution, NoSolution]:
    """Gauss-Jordan elimination; free variables are set to zero."""
    system = make_linear_system(variables, equalities, nonneg=())
    index = {v: i for i, v in enumerate(system.variables)}
    rows = [({index[v]: c for v, c in coefficients.items()}, b) for coefficients, b in system.equalities]
    matrix = [dict(row) for row, _ in rows]
    rhs = [b for _, b in rows]

    pivot_columns: List[int] = []
    r = 0
    for column in range(len(system.variables)):
        if r == len(matrix):
            break
        found = next((i for i in range(r, len(matrix)) if matrix[i].get(column)), None)
        if found is None:
            continue
        matrix[r], matrix[found] = matrix[found], matrix[r]
        rhs[r], rhs[found] = rhs[found], rhs[r]
        a = matrix[r][column]
        if a != 1:
            for k in list(matrix[r]):
                matrix[r][k] /= a
            rhs[r] /= a
        for i in range(len(matrix)):
            if i == r:
                continue
            factor = matrix[i].get(column)
            if factor:
                _axpy(matrix[i], -factor, matrix[r])
                rhs[i] -= factor * rhs[r]
        pivot_columns.append(column)
        r += 1

    if any(rhs[i] != 0 for i in range(r, len(matrix))):
        return NoSolution()

    values = {v: Fraction(0) for v in system.variables}
    for i, column in enumerate(pivot_columns):
        values[system.variables[column]] = rhs[i]
    _verify(system, values, check_nonneg=False)
    return Solution(values)


def _verify(system: LinearSystem, point: Mapping[Hashable, Fraction], check_nonneg: bool) -> None:
    for coefficients, b in system.equalities:
        if sum((c * point[v] for v, c in coefficients.items()), Fraction(0)) != b:
            raise InternalError("solver returned a point violating an equality")
    if check_nonneg and any(point[v] < 0 for v in system.nonneg):
        raise InternalError("solver returned a point violating nonnegativity")
