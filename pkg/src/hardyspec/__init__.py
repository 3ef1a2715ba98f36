"""Hardy-type uncertainty weights, radial reduction and bound-state counting
on model noncompact ends."""

__version__ = "0.1.0"

from . import criteria, forms, geometry, reduction, spectrum
from .errors import ConfigError, DomainError, RefinementCapError, UnsupportedProfileError

__all__ = [
    "__version__",
    "geometry",
    "reduction",
    "forms",
    "spectrum",
    "criteria",
    "ConfigError",
    "DomainError",
    "RefinementCapError",
    "UnsupportedProfileError",
]
