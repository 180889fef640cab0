"""Shared exception types."""


class InvalidInputError(ValueError):
    """Argument outside the documented domain of an operation."""


class DivergentIntegralError(InvalidInputError):
    """Requested moment or integral does not converge."""


class UndecidableError(Exception):
    """Comparison cannot be decided from the given representations.

    Distinct from a negative answer: the inputs are incomparable, not
    ordered the wrong way.
    """


class UnsupportedConfigurationError(InvalidInputError):
    """Configuration is valid syntax but outside the supported regime."""


class AccuracyError(RuntimeError):
    """Quadrature budget exhausted before reaching the target tolerance.

    Carries the best partial value so callers can decide whether to use it.
    """

    def __init__(self, message, partial=None, est_error=None):
        super().__init__(message)
        self.partial = partial
        self.est_error = est_error


class InvalidSymbolError(ValueError):
    """Symbol fails a positivity requirement on the evaluation grid."""
