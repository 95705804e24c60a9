"""Exception types shared across the package."""


class FaberElastError(Exception):
    """Base class for all package errors."""


class DomainError(FaberElastError, ValueError):
    """A point lies outside the domain of validity of an evaluation."""


class ConvexityError(FaberElastError, ValueError):
    """Material constants violate strong convexity (mu > 0, lambda + mu > 0)."""


class ProximityError(DomainError):
    """A quadrature target is too close to the boundary for the naive rule."""


class NumericError(FaberElastError, ArithmeticError):
    """An evaluation hit a numerically degenerate configuration."""


class SingularBlockError(FaberElastError, ArithmeticError):
    """The coupled coefficient block is too ill-conditioned to invert."""


class DegenerateRotationError(FaberElastError, ArithmeticError):
    """The denominator fixing the rotation constant is below threshold."""


class TruncationError(FaberElastError, ValueError):
    """The requested truncation order cannot represent the data exactly."""


class ConfigError(FaberElastError, ValueError):
    """A job configuration file is missing keys or violates an invariant."""
