"""Exception types shared across the package."""


class AnalogEccError(Exception):
    """Base class for all package errors."""


class DimensionError(AnalogEccError, ValueError):
    """Operand shapes do not agree."""


class DomainError(AnalogEccError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class RankError(AnalogEccError, ValueError):
    """A matrix or column subset is rank deficient.

    ``subset`` holds the offending column indices when they are known.
    """

    def __init__(self, message, subset=None):
        super().__init__(message)
        self.subset = tuple(subset) if subset is not None else None


class LpSolverError(AnalogEccError, RuntimeError):
    """The simplex solver could not produce a trustworthy answer."""


class BudgetExceededError(AnalogEccError, RuntimeError):
    """An exact enumeration would solve more LPs than allowed."""

    def __init__(self, message, count):
        super().__init__(message)
        self.count = count
