"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration object violates its invariants."""


class DegenerateSolutionError(RuntimeError):
    """The solver's final iterate is the zero vector and cannot be normalized."""
