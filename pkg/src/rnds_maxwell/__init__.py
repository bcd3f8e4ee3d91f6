"""Maxwell fields and Regge-Wheeler-type waves on Reissner-Nordstrom-de Sitter exteriors.

Per-mode time-domain evolution in the tortoise coordinate, together with the
energy, conformal-energy and flux diagnostics used to study decay.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    InadmissibleParametersError,
    NumericError,
    RNdSError,
)
from .geometry import BlackHoleParams, GeometryMap, validate_params
from .harmonics import ModeIndex

__all__ = [
    "BlackHoleParams",
    "ConfigurationError",
    "DomainError",
    "GeometryMap",
    "InadmissibleParametersError",
    "ModeIndex",
    "NumericError",
    "RNdSError",
    "validate_params",
]
__version__ = "0.1.0"
