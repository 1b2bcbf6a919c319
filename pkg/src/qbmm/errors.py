"""Exception types shared across the package."""


class QbmmError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QbmmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RealizabilityError(QbmmError):
    """A moment vector admits no nonnegative representing distribution.

    Carries the index of the first offending Hankel quantity and its value.
    """

    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class RootFindingError(QbmmError):
    """Polynomial root extraction failed to converge.

    ``residuals`` holds |p(root)| for the candidates that failed the check.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InversionError(QbmmError):
    """Moment inversion could not reproduce the input to tolerance."""

    def __init__(self, message, residual=None, bracket=None):
        super().__init__(message)
        self.residual = residual
        self.bracket = bracket


class UnsupportedInputError(QbmmError):
    """The operation is only defined on a restricted input set."""
