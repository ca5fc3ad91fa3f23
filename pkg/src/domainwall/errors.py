"""Exception types shared across the package."""


class DomainWallError(Exception):
    """Base class for all package errors."""


class DimensionError(DomainWallError, ValueError):
    """Array lengths do not match the chain they refer to."""


class DomainError(DomainWallError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(DomainWallError, ValueError):
    """A request exceeds the exhaustive-enumeration limits."""


class ConvergenceError(DomainWallError, RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class EmbeddingError(DomainWallError, RuntimeError):
    """A hardware embedding could not be produced."""

    def __init__(self, message, coverage=None):
        super().__init__(message)
        self.coverage = coverage


class InputError(DomainWallError, ValueError):
    """Malformed user-supplied data (sample logs, series, documents)."""
