"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific one that applies.
"""


class ConfigError(ValueError):
    """A run configuration is malformed (unknown fields, missing parameters)."""


class DomainError(ValueError):
    """A radius, interval or parameter lies outside the model's domain."""


class UnsupportedProfileError(DomainError):
    """The requested quantity has no closed form for this warp profile."""


class RefinementCapError(RuntimeError):
    """A numerical refinement loop hit its cap before reaching its target."""
