"""Exception types shared across the library."""


class GroverIteError(Exception):
    """Base class for all library errors."""


class EmptyMarkedSet(GroverIteError):
    """Operation requires at least one marked item."""


class DegenerateInstance(GroverIteError):
    """Instance has M = 0 or M = N, so the initial variance vanishes."""


class DimensionTooLarge(GroverIteError):
    """Dense-matrix operation requested beyond the supported dimension."""


class NumericalDomain(GroverIteError):
    """A numerical argument left its valid domain by more than the guard band."""


class NotOrthonormal(GroverIteError):
    """Supplied vectors are not an orthonormal pair."""


class ZeroVariance(GroverIteError):
    """State is an eigenvector of the Hamiltonian; no rotation direction exists."""


class NullDirection(GroverIteError):
    """Both linear-combination coefficients are zero."""


class DepthExceeded(GroverIteError):
    """Recursive formula nesting exceeds the supported depth."""


class NegativeDuration(GroverIteError):
    """Flow durations must be nonnegative."""


class InsufficientData(GroverIteError):
    """Not enough usable points for a fit."""


class NonAlternatingSchedule(GroverIteError):
    """Schedule cannot be expressed as oracle/diffusion iterate pairs."""


class DomainError(GroverIteError):
    """Scalar parameter outside its documented range."""


class DegreeTooSmall(GroverIteError):
    """Available polynomial degree cannot meet the approximation contract."""


class OptimizerDiverged(GroverIteError):
    """Phase optimization produced a non-finite cost."""


class ConfigInvalid(GroverIteError):
    """Experiment configuration failed validation."""
