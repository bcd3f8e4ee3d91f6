"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every failure the library can raise
belongs to exactly one of the families below.
"""

from __future__ import annotations


class RNdSError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RNdSError, ValueError):
    """Non-finite or otherwise malformed numeric input."""


class DomainError(RNdSError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class InadmissibleParametersError(DomainError):
    """(M, Q, Lambda) do not describe a black hole with three positive horizons.

    ``clause`` names the first admissibility condition that fails.
    """

    def __init__(self, message: str, clause: str):
        super().__init__(message)
        self.clause = clause


class DegenerateGeometryError(DomainError):
    """Coincident horizon radii (extremal or near-extremal tuning)."""


class ExcludedModeError(DomainError):
    """The l = 0 (pure charge) sector was requested."""


class ConfigurationError(RNdSError, ValueError):
    """Inconsistent run configuration (CFL, support, unknown keys, ...)."""


class NumericError(RNdSError, ArithmeticError):
    """An iterative method failed to converge.

    ``trace`` holds whatever per-iteration history the caller recorded.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


class InstabilityError(NumericError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class ConstraintBlowupError(NumericError):
    """The monitored Maxwell constraint exceeded its configured ceiling."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class InsufficientDataError(RNdSError, ValueError):
    """Too few records for a diagnostic that differentiates or integrates in time."""


class CoverageError(RNdSError, ValueError):
    """A hypersurface leaves the time range covered by a trajectory."""


class FitError(RNdSError, ValueError):
    """A decay series is too short or degenerate to fit."""
