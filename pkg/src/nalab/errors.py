"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class GridRangeError(IndexError):
    """Annulus index or scale outside the configured grid."""


class PoleError(ValueError):
    """Parameter hits a pole of the function being evaluated."""


class PrecisionError(ArithmeticError):
    """Requested accuracy cannot be certified (series too slow, grid too coarse)."""


class UnsupportedError(ValueError):
    """Valid input that this implementation deliberately does not cover."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""
