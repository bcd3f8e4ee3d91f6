"""Per-mode angular algebra for the spin-weighted harmonic decomposition.

Only the numbers that survive mode reduction are needed: the sphere Laplacian
eigenvalue and the four coupling constants that replace the angular operators
in the compacted Maxwell equations.

Sign convention (module-wide): with s = sqrt(l(l+1)),

    c_minus = c_prime = +s,    c_plus = c_dprime = -s.

Any choice with c_minus c_plus = c_prime c_dprime = -l(l+1) is compatible with
the wave equation for the middle component, and c_plus = -c_minus,
c_dprime = -c_prime makes the energy flux conserved.  Energies only involve
|Psi|^2 so nothing observable depends on the overall signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ExcludedModeError


@dataclass(frozen=True)
class ModeIndex:
    l: int
    n: int = 0

    def __post_init__(self):
        if int(self.l) != self.l or int(self.n) != self.n:
            raise DomainError(f"mode indices must be integers, got ({self.l}, {self.n})")
        if self.l < 1:
            raise ExcludedModeError(
                "l = 0 is the stationary pure-charge sector and is excluded"
            )
        if abs(self.n) > self.l:
            raise DomainError(f"|n| must not exceed l, got n={self.n}, l={self.l}")


@dataclass(frozen=True)
class CouplingConstants:
    c_plus: float
    c_minus: float
    c_prime: float
    c_dprime: float


def _check_l(l: int, allow_zero: bool = False) -> int:
    if int(l) != l:
        raise DomainError(f"l must be an integer, got {l!r}")
    l = int(l)
    if l < 0:
        raise DomainError(f"l must be non-negative, got {l}")
    if l == 0 and not allow_zero:
        raise ExcludedModeError("l = 0 is excluded")
    return l


def laplacian_eigenvalue(l: int) -> float:
    """Eigenvalue -l(l+1) of the unit-sphere Laplacian."""
    l = _check_l(l, allow_zero=True)
    return -float(l * (l + 1))


def coupling_constants(l: int) -> CouplingConstants:
    l = _check_l(l)
    s = math.sqrt(l * (l + 1))
    return CouplingConstants(c_plus=-s, c_minus=s, c_prime=s, c_dprime=-s)


def poincare_gap(l: int) -> float:
    """l(l+1); the per-mode angular Poincare bound needs this to be >= 2."""
    l = _check_l(l)
    return float(l * (l + 1))


def gradient_weight(l: int) -> float:
    """Sphere integral of |grad u|^2 over that of |u|^2 for a pure mode."""
    return poincare_gap(l)


def laplacian_squared_weight(l: int) -> float:
    """Sphere integral of |Lap u|^2 over that of |u|^2 for a pure mode."""
    return poincare_gap(l) ** 2
