"""Per-mode field states on a uniform r_* grid and the stress-energy algebra.

A mode of the scalar problem is a pair (u, u_t); a Maxwell mode is the triple
of spin components (Psi_1, Psi_0, Psi_-1).  States are immutable snapshots:
evolution produces new ones and diagnostics read them.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigurationError, DomainError, InvalidInputError
from .geometry import BlackHoleParams, GeometryMap
from .harmonics import ModeIndex, coupling_constants

GAUSSIAN_CUTOFF = 1e-300
EDGE_DECAY = 1e-12


# ---------------------------------------------------------------------------
# grid and spatial stencils
# ---------------------------------------------------------------------------


class Grid:
    """Uniform r_* grid on [-L, L] with the geometric coefficients at the nodes.

    Parameters
    ----------
    geometry : GeometryMap
    L : float
        Half-width in r_*.
    n_points : int
        Number of nodes, at least 16.
    """

    def __init__(self, geometry: GeometryMap, L: float, n_points: int):
        if not (isinstance(n_points, (int, np.integer)) and n_points >= 16):
            raise ConfigurationError(f"n_points must be an integer >= 16, got {n_points!r}")
        if not (math.isfinite(L) and L > 0):
            raise ConfigurationError(f"L must be positive and finite, got {L!r}")
        self.geometry = geometry
        self.L = float(L)
        self.n_points = int(n_points)
        self.r_star = np.linspace(-self.L, self.L, self.n_points)
        self.h = 2.0 * self.L / (self.n_points - 1)
        s = geometry.sample(self.r_star)
        self.r = s.r
        self.f = s.f
        self.fp = s.fp
        self.V = s.f / s.r**2
        self.dV = s.f * (s.fp / s.r**2 - 2.0 * s.f / s.r**3)
        self.trap = 1.0 + self.r_star * (0.5 * s.fp - s.f / s.r) + geometry.trap_offset
        self.potential_on = True

    @classmethod
    def from_spacing(cls, geometry: GeometryMap, L: float, h: float) -> "Grid":
        n = int(round(2.0 * L / h)) + 1
        return cls(geometry, L, n)

    def without_potential(self) -> "Grid":
        """Copy with V and dV set to zero: the free 1+1 wave equation (test hook)."""
        g = object.__new__(Grid)
        g.__dict__.update(self.__dict__)
        g.V = np.zeros_like(self.V)
        g.dV = np.zeros_like(self.dV)
        g.potential_on = False
        return g

    def integrate(self, values) -> float:
        """Trapezoid rule over the whole grid."""
        return float(np.trapezoid(values, dx=self.h))

    def __repr__(self):
        return f"Grid(L={self.L:g}, n_points={self.n_points}, h={self.h:g})"


def d_dx(u: np.ndarray, h: float) -> np.ndarray:
    """Second-order centred derivative, one-sided second order at the edges."""
    d = np.empty_like(u)
    d[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    d[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return d


def d_dx4(u: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order centred derivative; second-order stencils in the two edge cells."""
    d = d_dx(u, h)
    d[2:-2] = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    return d


def d2_dx2(u: np.ndarray, h: float) -> np.ndarray:
    """Second-order centred second derivative; zero at the two edge nodes."""
    d = np.zeros_like(u)
    d[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    return d


# ---------------------------------------------------------------------------
# initial profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """amplitude * exp(-(r_* - center)^2 / (2 width^2)), zeroed below 1e-300."""

    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigurationError("gaussian width must be positive")

    def __call__(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        v = self.amplitude * np.exp(-0.5 * z * z)
        return np.where(np.abs(v) < GAUSSIAN_CUTOFF, 0.0, v)

    def support(self):
        if self.amplitude == 0:
            return None
        # |A| exp(-z^2/2) >= 1e-300
        zmax = math.sqrt(2.0 * math.log(abs(self.amplitude) / GAUSSIAN_CUTOFF))
        return (self.center - zmax * self.width, self.center + zmax * self.width)


@dataclass(frozen=True)
class Bump:
    """Smooth compactly supported bump amplitude * exp(1 - 1/(1 - y^2)) on (a, b)."""

    a: float = -1.0
    b: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ConfigurationError("bump support must satisfy a < b")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = (2.0 * x - (self.a + self.b)) / (self.b - self.a)
        inside = np.abs(y) < 1.0
        out = np.zeros_like(x)
        yi = y[inside]
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - yi * yi))
        return out

    def support(self):
        return None if self.amplitude == 0 else (self.a, self.b)


@dataclass(frozen=True)
class Zero:
    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def support(self):
        return None


@dataclass(frozen=True, eq=False)
class Samples:
    """Custom node values; no support check is applied to these."""

    values: np.ndarray

    def __call__(self, x):
        v = np.asarray(self.values)
        if v.shape != np.shape(x):
            raise ConfigurationError(
                f"custom samples have shape {v.shape}, grid needs {np.shape(x)}"
            )
        return v


Profile = Union[Gaussian, Bump, Zero, Samples]


def profile_from_spec(kind: str, center: float = 0.0, width: float = 1.0, amplitude: float = 1.0) -> Profile:
    """Built-in profile by name; ``bump`` uses [center - width, center + width]."""
    if kind == "gaussian":
        return Gaussian(center, width, amplitude)
    if kind == "bump":
        return Bump(center - width, center + width, amplitude)
    if kind == "zero":
        return Zero()
    raise ConfigurationError(f"unknown profile type {kind!r}")


def _sample_profile(profile: Profile, grid: Grid) -> np.ndarray:
    vals = np.asarray(profile(grid.r_star))
    if not np.all(np.isfinite(vals)):
        raise InvalidInputError("profile produced non-finite values")
    if isinstance(profile, Samples):
        return vals.astype(complex)
    sup = profile.support()
    if sup is not None:
        half = 0.5 * grid.L
        if sup[0] <= -half or sup[1] >= half:
            raise ConfigurationError(
                f"profile support {sup} is not inside (-{half:g}, {half:g}); enlarge L"
            )
    outer = np.abs(grid.r_star) >= 0.9 * grid.L
    if np.any(np.abs(vals[outer]) >= EDGE_DECAY):
        raise ConfigurationError("profile does not decay below 1e-12 in the outer 10% of the grid")
    return vals.astype(complex)


def _as_mode(mode) -> ModeIndex:
    if isinstance(mode, ModeIndex):
        return mode
    if isinstance(mode, tuple):
        return ModeIndex(*mode)
    return ModeIndex(int(mode))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveModeState:
    mode: ModeIndex
    grid: Grid = field(repr=False)
    t: float
    u: np.ndarray = field(repr=False)
    ut: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("u", "ut"):
            a = _frozen(getattr(self, name))
            if a.shape != (self.grid.n_points,):
                raise InvalidInputError(f"{name} must have length {self.grid.n_points}")
            if not np.all(np.isfinite(a)):
                raise InvalidInputError(f"{name} has non-finite entries")
            object.__setattr__(self, name, a)

    @property
    def components(self):
        return (self.u, self.ut)


@dataclass(frozen=True, eq=False)
class MaxwellModeState:
    mode: ModeIndex
    grid: Grid = field(repr=False)
    t: float
    psi_plus: np.ndarray = field(repr=False)
    psi_zero: np.ndarray = field(repr=False)
    psi_minus: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.mode.l < 1:  # ModeIndex already refuses this; kept as a guard
            raise DomainError("l = 0 Maxwell states are excluded")
        for name in ("psi_plus", "psi_zero", "psi_minus"):
            a = _frozen(getattr(self, name))
            if a.shape != (self.grid.n_points,):
                raise InvalidInputError(f"{name} must have length {self.grid.n_points}")
            if not np.all(np.isfinite(a)):
                raise InvalidInputError(f"{name} has non-finite entries")
            object.__setattr__(self, name, a)

    @property
    def components(self):
        return (self.psi_plus, self.psi_zero, self.psi_minus)

    def psi_zero_t(self) -> np.ndarray:
        """dPsi_0/dt from the averaged compacted equations."""
        c = coupling_constants(self.mode.l)
        return 0.5 * (c.c_minus * self.psi_plus - c.c_prime * self.psi_minus)

    def constraint(self, order: int = 4) -> np.ndarray:
        """C = dPsi_0/dr_* - (c_minus Psi_1 + c_prime Psi_-1)/2 at the nodes."""
        c = coupling_constants(self.mode.l)
        D = d_dx4 if order == 4 else d_dx
        return D(self.psi_zero, self.grid.h) - 0.5 * (
            c.c_minus * self.psi_plus + c.c_prime * self.psi_minus
        )

    def constraint_norm(self, order: int = 4) -> float:
        C = self.constraint(order)
        return math.sqrt(self.grid.integrate(np.abs(C) ** 2))


def make_wave_state(mode, grid: Grid, profile: Profile, ut_profile: Optional[Profile] = None, t: float = 0.0) -> WaveModeState:
    mode = _as_mode(mode)
    u = _sample_profile(profile, grid)
    ut = _sample_profile(ut_profile or Zero(), grid)
    return WaveModeState(mode, grid, float(t), u, ut)


def make_maxwell_state(mode, grid: Grid, psi_zero_profile: Profile, ut_profile: Optional[Profile] = None, t: float = 0.0) -> MaxwellModeState:
    """Constraint-compatible Maxwell data from Psi_0 and dPsi_0/dt."""
    mode = _as_mode(mode)
    c = coupling_constants(mode.l)
    p0 = _sample_profile(psi_zero_profile, grid)
    pt = _sample_profile(ut_profile or Zero(), grid)
    dp = d_dx(p0, grid.h)
    p1 = (pt + dp) / c.c_minus
    pm = -(pt - dp) / c.c_prime
    return MaxwellModeState(mode, grid, float(t), p1, p0, pm)


# ---------------------------------------------------------------------------
# stress-energy algebra
# ---------------------------------------------------------------------------


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    return r


def stress_energy_components(phi1, phi0, phim1, r, f):
    """(T00, T01, T11) in (t, r_*) coordinates from the spin components."""
    r = _check_r(r)
    a1, a0, am = np.abs(phi1) ** 2, np.abs(phi0) ** 2, np.abs(phim1) ** 2
    w = 2.0 * np.asarray(f, dtype=float) / r**2
    q = 4.0 * r**2
    return (a1 + w * a0 + am) / q, (a1 - am) / q, (a1 - w * a0 + am) / q


def stress_energy_null(phi1, phi0, phim1, r, f):
    """(T_LL, T_LN, T_NN) for L = d_t + d_r*, N = d_t - d_r*."""
    r = _check_r(r)
    return (
        np.abs(phi1) ** 2 / r**2,
        np.asarray(f, dtype=float) * np.abs(phi0) ** 2 / r**4,
        np.abs(phim1) ** 2 / r**2,
    )


def mode_amplitude(state: MaxwellModeState, i: int) -> float:
    """|Psi_1| + |Psi_0| + |Psi_-1| at node i."""
    n = state.grid.n_points
    if not (isinstance(i, (int, np.integer)) and -n <= i < n):
        raise IndexError(f"node index {i} out of range for {n} points")
    return float(abs(state.psi_plus[i]) + abs(state.psi_zero[i]) + abs(state.psi_minus[i]))


# ---------------------------------------------------------------------------
# snapshot text format
# ---------------------------------------------------------------------------

_WAVE_COLS = ("u", "ut")
_MAXWELL_COLS = ("psi_plus", "psi_zero", "psi_minus")


def write_snapshot(state, dest) -> None:
    """Columnar text snapshot: one metadata line, one column line, one row per node."""
    p = state.grid.geometry.params
    kind = "maxwell" if isinstance(state, MaxwellModeState) else "wave"
    names = _MAXWELL_COLS if kind == "maxwell" else _WAVE_COLS
    meta = (
        f"# kind={kind} M={p.M!r} Q={p.Q!r} Lambda={p.Lambda!r} l={state.mode.l} "
        f"n={state.mode.n} t={state.t!r} L={state.grid.L!r} n_points={state.grid.n_points}"
    )
    cols = ["r_star"] + [f"{part}_{nm}" for nm in names for part in ("re", "im")]
    data = [state.grid.r_star]
    for nm in names:
        a = getattr(state, nm)
        data += [a.real, a.imag]
    buf = io.StringIO()
    buf.write(meta + "\n# " + " ".join(cols) + "\n")
    np.savetxt(buf, np.column_stack(data), fmt="%.17g")
    text = buf.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def read_snapshot(src, geometry: Optional[GeometryMap] = None):
    """Inverse of :func:`write_snapshot`; rebuilds the geometry when not given."""
    text = src.read() if hasattr(src, "read") else open(src).read()
    first = text.splitlines()[0]
    if not first.startswith("#"):
        raise InvalidInputError("snapshot is missing its metadata line")
    meta = dict(item.split("=", 1) for item in first[1:].split())
    data = np.loadtxt(io.StringIO(text), comments="#", ndmin=2)
    if geometry is None:
        geometry = GeometryMap(BlackHoleParams(float(meta["M"]), float(meta["Q"]), float(meta["Lambda"])))
    grid = Grid(geometry, float(meta["L"]), int(meta["n_points"]))
    mode = ModeIndex(int(meta["l"]), int(meta["n"]))
    cplx = [data[:, 1 + 2 * k] + 1j * data[:, 2 + 2 * k] for k in range((data.shape[1] - 1) // 2)]
    t = float(meta["t"])
    if meta["kind"] == "maxwell":
        return MaxwellModeState(mode, grid, t, *cplx)
    return WaveModeState(mode, grid, t, *cplx)


def with_time(state, t: float):
    return replace(state, t=float(t))
