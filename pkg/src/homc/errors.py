"""Exception types shared across the package."""


class HomcError(Exception):
    """Base class for all package errors."""


class InvalidIndexError(HomcError, IndexError):
    """Index tuple or linear offset outside the tensor's range."""


class ShapeError(HomcError, ValueError):
    """Tensor or matrix dimensions are incompatible with the operation."""


class StochasticityError(HomcError, ValueError):
    """A tensor that should be stochastic is not.

    ``context`` holds the offending trailing tuple ``(i2, ..., im)``
    (1-based) when the failure is tied to a single column.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context


class NonConvergenceError(HomcError, RuntimeError):
    """An iterative method exhausted its iteration budget."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularSystemError(HomcError, ArithmeticError):
    """A linear subsystem is numerically singular; ``block`` is 1-based."""

    def __init__(self, message, block):
        super().__init__(message)
        self.block = block
