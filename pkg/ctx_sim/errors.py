"""Exception hierarchy for ctx-sim."""

from typing import Iterable, Optional


class CtxError(Exception):
    """Base class for every error raised by ctx-sim."""


class ValidationError(CtxError, ValueError):
    """Input data does not describe a valid object."""


class BudgetExceeded(CtxError):
    """An enumeration would exceed its configured ceiling."""

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: {size} exceeds budget {budget}")


class InternalError(CtxError, RuntimeError):
    """A postcondition failed. Always a bug, never an answer."""


# Scenarios and assignments

class DuplicateMeasurementId(ValidationError):
    pass


class InvalidMeasurementId(ValidationError):
    pass


class EmptyOutcomeSet(ValidationError):
    pass


class DuplicateOutcome(ValidationError):
    pass


class UnknownMeasurement(ValidationError):
    pass


class UnknownMeasurementInContext(ValidationError):
    pass


class UncoveredMeasurement(ValidationError):
    pass


class InvalidArity(ValidationError):
    pass


class InvalidAssignment(ValidationError):
    pass


class NotSubdomain(ValidationError):
    pass


class NotAContext(ValidationError):
    pass


# Empirical models

class NotAFacet(ValidationError):
    pass


class MissingFacet(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class IncompatibleMarginals(ValidationError):
    """Two facet distributions disagree on their common sub-context."""

    def __init__(self, facets, context, detail: Optional[str] = None):
        self.facets = tuple(facets)
        self.context = context
        names = " and ".join("{" + ",".join(sorted(f)) + "}" for f in self.facets)
        message = f"marginals of {names} differ on {{{','.join(sorted(context))}}}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class EmptySupport(ValidationError):
    pass


class IncompatibleSupports(ValidationError):
    def __init__(self, facets, context):
        self.facets = tuple(facets)
        self.context = context
        names = " and ".join("{" + ",".join(sorted(f)) + "}" for f in self.facets)
        super().__init__(f"supports of {names} differ on {{{','.join(sorted(context))}}}")


class EmptyCollection(ValidationError):
    pass


class NotGlobal(ValidationError):
    pass


class ScenarioMismatch(ValidationError):
    pass


# Linear systems

class MalformedSystem(ValidationError):
    pass


# Procedures

class NotSimplicial(ValidationError):
    """A facet of the target is sent outside the source's complex."""

    def __init__(self, facet: Iterable[str], image: Iterable[str]):
        self.facet = frozenset(facet)
        self.image = frozenset(image)
        super().__init__(
            f"facet {{{','.join(sorted(self.facet))}}} queries "
            f"{{{','.join(sorted(self.image))}}}, which is not a context of the source"
        )


class IncompleteTable(ValidationError):
    pass


class CodomainViolation(ValidationError):
    pass


# Games and hom scenarios

class NotAnExperiment(ValidationError):
    pass


class NotProbabilistic(ValidationError):
    pass


class NotDichotomic(ValidationError):
    pass


class MalformedQuery(ValidationError):
    pass


class UnsatisfiablePredicate(ValidationError):
    pass


# Files

class FormatError(ValidationError):
    pass
