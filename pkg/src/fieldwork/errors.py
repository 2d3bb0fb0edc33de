"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` (bad input, CLI exit
code 2) and :class:`NumericalError` (a computation failed to meet its
tolerance, CLI exit code 3).
"""


class FieldworkError(Exception):
    """Base class for all package errors."""


class ValidationError(FieldworkError, ValueError):
    """Input violates a documented precondition."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class NonHermitianError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class UnsupportedMomentError(ValidationError):
    pass


class StripViolationError(ValidationError):
    """Complex argument outside the analyticity strip |Im mu| <= beta."""


class PhaseUnavailableError(ValidationError):
    """A magnitude-only profile was asked for its complex transform."""


class TimeProfileUnavailableError(ValidationError):
    pass


class NumericalError(FieldworkError, ArithmeticError):
    pass


class NumericalUnderflowError(NumericalError):
    pass


class QuadratureNonConvergenceError(NumericalError):
    pass


class WindowTooNarrowError(NumericalError):
    """The mu-grid of an FFT inversion is too short for the characteristic function to decay."""


class DegenerateBasisWarning(UserWarning):
    """Degenerate (or nearly degenerate) eigenvalues were merged into one level."""
