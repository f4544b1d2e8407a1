"""Exception types raised across the package."""


class DriftMimoError(Exception):
    """Base class for all package errors."""


class DomainError(DriftMimoError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DriftMimoError, OverflowError):
    """The result would overflow double precision."""


class ConfigurationError(DriftMimoError, ValueError):
    """A model or experiment configuration is incomplete or inconsistent."""


class AccuracyError(DriftMimoError, ArithmeticError):
    """A numerical method failed to reach the requested tolerance.

    The best estimate and its error bound are kept so callers can decide
    whether to use them anyway.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SearchError(DriftMimoError, ArithmeticError):
    """A root search found no crossing inside its bound."""


class ResolutionError(DriftMimoError, ValueError):
    """A sampled grid is too short or too coarse for the requested transform."""


class CoverageError(DriftMimoError, ValueError):
    """Histogram bins do not cover all realized samples."""
