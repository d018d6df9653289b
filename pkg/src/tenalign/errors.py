"""Exception types shared across the package."""


class TenalignError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(TenalignError, ValueError):
    """Operands disagree on a dimension, shape, or tensor order."""


class UnsupportedContractionError(TenalignError, ValueError):
    """A contraction was requested for an unsupported number of modes."""


class DegenerateIterateError(TenalignError, RuntimeError):
    """An iteration produced a zero (or otherwise unusable) iterate."""


class DegenerateProblemError(TenalignError, ValueError):
    """The problem instance is degenerate, e.g. an empty motif tensor."""


class NumericalFailureError(TenalignError, ArithmeticError):
    """Non-finite values were produced or supplied where finite ones are required."""


class BudgetExceededError(TenalignError, ValueError):
    """A dense/enumeration budget would be exceeded by the requested operation."""
