"""Exception types shared across the package."""


class RenyiscError(Exception):
    """Base class for all package errors."""


class UsageError(RenyiscError):
    """Invalid arguments, labels, dimensions, or file contents."""


class DimensionMismatchError(UsageError):
    """Operator shapes or system dimensions do not line up."""


class NotPositiveSemidefiniteError(RenyiscError):
    """A matrix required to be PSD has a significantly negative eigenvalue."""


class InvalidChannelError(RenyiscError):
    """A Stinespring isometry fails the isometry condition."""


class BudgetExceededError(RenyiscError):
    """A protocol instance exceeds the configured dimension budget."""


class ConvergenceError(RenyiscError):
    """An inner optimization failed to converge.

    Carries the best value and residual found so far.
    """

    def __init__(self, message, best_value=None, residual=None):
        super().__init__(message)
        self.best_value = best_value
        self.residual = residual
