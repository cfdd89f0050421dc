"""Exception hierarchy shared by all opindyn modules."""


class OpinionDynamicsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OpinionDynamicsError, ValueError):
    """Input violates a mathematical precondition (negative entry, bad row sum, ...)."""


class DimensionError(OpinionDynamicsError, ValueError):
    """Array shapes are incoherent."""


class AmbiguityError(OpinionDynamicsError):
    """A requested vector is not uniquely defined (eigenspace of dimension > 1)."""

    def __init__(self, message, nullity):
        super().__init__(message)
        self.nullity = nullity


class SingularMatrixError(OpinionDynamicsError):
    """Matrix is singular to working precision."""

    def __init__(self, message, pivot):
        super().__init__(message)
        self.pivot = pivot


class ConvergenceError(OpinionDynamicsError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message, estimate=None, residual=None, iterations=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


class ExpmOverflowError(OpinionDynamicsError, OverflowError):
    """Matrix exponential overflowed; split the time interval into smaller pieces."""


class NonFiniteStateError(OpinionDynamicsError):
    """A simulation produced NaN or inf; ``trajectory`` holds the states up to the last good one."""

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class RefusalError(OpinionDynamicsError):
    """An analytical quantity was requested whose preconditions the model does not meet.

    ``reason`` carries the machine-readable verdict tag that justifies the refusal.
    """

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason
