"""Exception hierarchy shared across the package."""


class CurveError(ValueError):
    """Invalid curve data (too few points, bad shape, ...)."""


class DegenerateCurveError(CurveError):
    """Curve has zero total length; arc-length operations are undefined."""


class ValidationError(ValueError):
    """A configuration or constraint check failed."""


class ConfigError(ValidationError):
    """Malformed or unknown configuration input."""


class NumericalError(RuntimeError):
    """A linear-algebra or optimization step failed beyond recovery."""
