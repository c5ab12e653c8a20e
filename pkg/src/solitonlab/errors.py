"""Exception hierarchy shared by every module."""


class SolitonLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SolitonLabError, ValueError):
    """Bad parameters, unknown names or missing geometric data."""


class DomainError(SolitonLabError):
    """A point or finite-difference stencil left the chart domain."""


class InvalidMetricError(SolitonLabError):
    """Metric components are not symmetric positive definite."""


class HermitianViolationError(SolitonLabError):
    """The pair (g, J) is not Hermitian, or J is not a complex structure."""

    def __init__(self, message, deviation=float("nan")):
        super().__init__(message)
        self.deviation = deviation


class PreconditionError(SolitonLabError):
    """An identity was requested outside the hypotheses it is derived under."""


class EigenGapError(PreconditionError):
    """W+ eigenvalues are too close for a smooth eigenframe."""

    def __init__(self, message, gap=float("nan")):
        super().__init__(message)
        self.gap = gap


class FrameDiscontinuityError(PreconditionError):
    """Frames across a difference stencil do not vary continuously."""
