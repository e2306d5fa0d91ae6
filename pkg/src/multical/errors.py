"""Exception hierarchy.

Guard violations (sizes that would blow up an exact computation) derive from
:class:`GuardError` so callers such as the CLI can map them to one exit code.
"""


class MulticalError(Exception):
    """Base class for all package errors."""


class NotOnSimplex(MulticalError, ValueError):
    pass


class DimensionTooSmall(MulticalError, ValueError):
    pass


class DimensionMismatch(MulticalError, ValueError):
    pass


class EmptySubset(MulticalError, ValueError):
    pass


class EmptyPacking(MulticalError, ValueError):
    pass


class InvalidMagnitude(MulticalError, ValueError):
    pass


class BadPrior(MulticalError, ValueError):
    pass


class InsufficientData(MulticalError, ValueError):
    pass


class SolverFailure(MulticalError, RuntimeError):
    pass


class NoProgress(MulticalError, RuntimeError):
    pass


class GuardError(MulticalError):
    """An input exceeds a size guard of an exact algorithm."""


class TooLarge(GuardError):
    pass


class TooManySubsets(GuardError):
    pass


class BudgetExceeded(GuardError):
    pass


class DegreeBudgetExceeded(GuardError):
    pass


class DatasetError(MulticalError, ValueError):
    """A dataset file could not be parsed."""
