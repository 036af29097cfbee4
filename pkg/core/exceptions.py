"""Exception hierarchy shared by every toolkit module."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimensionError(ToolkitError, ValueError):
    """Operand shapes are empty, inconsistent or overflow the index range."""


class InvalidParameterError(ToolkitError, ValueError):
    """A problem or method parameter is outside its admissible range."""


class InvalidInputError(ToolkitError, ValueError):
    """Input data violates a precondition (symmetry, non-zero vector, ...)."""


class UsageError(ToolkitError, ValueError):
    """Command-line or run specification is malformed."""


class ResourceLimitError(ToolkitError, RuntimeError):
    """A dense or spectral computation would exceed the desk-scale guard."""


class NumericalFailureError(ToolkitError, ArithmeticError):
    """Base class for failures that happen while computing."""


class SingularMatrixError(NumericalFailureError):
    """Factorization met an exactly zero pivot."""


class NotPositiveDefiniteError(NumericalFailureError):
    """Cholesky factorization met a non-positive pivot."""


class NumericalOverflowError(NumericalFailureError):
    """An iterate or basis vector became non-finite."""


class EigensolverError(NumericalFailureError):
    """The QR eigenvalue iteration did not converge."""


class InternalError(NumericalFailureError):
    """A state that theory rules out was reached anyway."""
