"""Energy functionals, identity residuals, fluxes and decay measurements.

Everything here is a pure function of stored states or trajectories.  All
spatial integrals use the trapezoid rule on the uniform grid; spatial
derivatives of stored data use the second-order centred stencil.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    CoverageError,
    DomainError,
    FitError,
    InsufficientDataError,
)
from .fields import MaxwellModeState, WaveModeState, d_dx
from .harmonics import laplacian_squared_weight, poincare_gap

NAN = float("nan")


@dataclass(frozen=True)
class EnergyRecord:
    """Diagnostics of one stored time level.

    ``trap`` is the instantaneous rate on the right of the relevant identity:
    dE_C/dt for scalar runs, dE_K/dt for Maxwell runs.  ``trap_integral`` is
    its time integral from the first record.  Columns that do not apply to a
    run kind hold NaN.
    """

    t: float
    E: float
    E_C: float
    E_ell: float
    E_T: float = NAN
    E_K: float = NAN
    trap: float = NAN
    trap_integral: float = NAN
    constraint: float = NAN

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# scalar functionals
# ---------------------------------------------------------------------------


def _wave_parts(state):
    """(u, u_t, u_x, l(l+1) V) for either state kind; Maxwell uses Psi_0."""
    g = state.grid
    W = poincare_gap(state.mode.l) * g.V
    if isinstance(state, MaxwellModeState):
        u, ut = state.psi_zero, state.psi_zero_t()
    else:
        u, ut = state.u, state.ut
    return u, ut, d_dx(u, g.h), W


def energy_density(state) -> np.ndarray:
    """e = |u_t|^2 + |u_x|^2 + l(l+1) V |u|^2."""
    u, ut, ux, W = _wave_parts(state)
    return np.abs(ut) ** 2 + np.abs(ux) ** 2 + W * np.abs(u) ** 2


def wave_energy(state) -> float:
    """E = 1/2 int e dr_*.  For Maxwell states, the energy of Psi_0."""
    return 0.5 * state.grid.integrate(energy_density(state))


def conformal_density(state, t: Optional[float] = None) -> np.ndarray:
    """Conformal density as a sum of squares.

    1/4 |(t+x)(u_t+u_x)|^2 + 1/4 |(t-x)(u_t-u_x)|^2 + 1/2 (t^2+x^2) W |u|^2 + e.
    """
    t = state.t if t is None else float(t)
    u, ut, ux, W = _wave_parts(state)
    x = state.grid.r_star
    e = np.abs(ut) ** 2 + np.abs(ux) ** 2 + W * np.abs(u) ** 2
    return (
        0.25 * np.abs((t + x) * (ut + ux)) ** 2
        + 0.25 * np.abs((t - x) * (ut - ux)) ** 2
        + 0.5 * (t * t + x * x) * W * np.abs(u) ** 2
        + e
    )


def conformal_density_direct(state, t: Optional[float] = None) -> np.ndarray:
    """1/2 (t^2 + x^2) e + 2 t x Re(conj(u_t) u_x) + e, the unsquared form."""
    t = state.t if t is None else float(t)
    u, ut, ux, W = _wave_parts(state)
    x = state.grid.r_star
    e = np.abs(ut) ** 2 + np.abs(ux) ** 2 + W * np.abs(u) ** 2
    return 0.5 * (t * t + x * x) * e + 2.0 * t * x * np.real(np.conj(ut) * ux) + e


def conformal_charge(state, t: Optional[float] = None) -> float:
    """E_C = 1/2 int (conformal density)."""
    return 0.5 * state.grid.integrate(conformal_density(state, t))


def _local_energy(state, t: float) -> float:
    x = state.grid.r_star
    mask = np.abs(x) <= 0.75 * t
    if mask.sum() < 2:
        return 0.0
    return float(np.trapezoid(energy_density(state)[mask], x[mask]))


def local_energy(state, t: Optional[float] = None) -> float:
    """E_ell = int_{|r_*| <= 3t/4} e, without the factor 1/2 carried by E."""
    t = state.t if t is None else float(t)
    if not t > 0:
        raise DomainError("local energy needs t > 0")
    return _local_energy(state, t)


def wave_trapping_rate(state, t: Optional[float] = None) -> float:
    """dE_C/dt for the scalar mode: int t V T l(l+1) |u|^2."""
    t = state.t if t is None else float(t)
    g = state.grid
    u = state.psi_zero if isinstance(state, MaxwellModeState) else state.u
    return t * poincare_gap(state.mode.l) * g.integrate(g.V * g.trap * np.abs(u) ** 2)


# ---------------------------------------------------------------------------
# Maxwell functionals
# ---------------------------------------------------------------------------


def maxwell_energy_density(state: MaxwellModeState) -> np.ndarray:
    V = state.grid.V
    return 0.25 * (
        np.abs(state.psi_plus) ** 2 + 2.0 * V * np.abs(state.psi_zero) ** 2 + np.abs(state.psi_minus) ** 2
    )


def maxwell_energy(state: MaxwellModeState) -> float:
    """E_T = 1/4 int (|Psi_1|^2 + 2 V |Psi_0|^2 + |Psi_-1|^2)."""
    return state.grid.integrate(maxwell_energy_density(state))


def conformal_energy_density(state: MaxwellModeState, t: Optional[float] = None) -> np.ndarray:
    t = state.t if t is None else float(t)
    x = state.grid.r_star
    up2, um2 = (t + x) ** 2, (t - x) ** 2
    V = state.grid.V
    return 0.25 * (
        up2 * np.abs(state.psi_plus) ** 2
        + (up2 + um2) * V * np.abs(state.psi_zero) ** 2
        + um2 * np.abs(state.psi_minus) ** 2
    )


def conformal_energy(state: MaxwellModeState, t: Optional[float] = None) -> float:
    """E_K with weights u_+ = t + r_*, u_- = t - r_*."""
    return state.grid.integrate(conformal_energy_density(state, t))


def maxwell_trapping_rate(state: MaxwellModeState, t: Optional[float] = None) -> float:
    """dE_K/dt = int 2 t V T |Psi_0|^2."""
    t = state.t if t is None else float(t)
    g = state.grid
    return 2.0 * t * g.integrate(g.V * g.trap * np.abs(state.psi_zero) ** 2)


def record_for_state(state, trap_integral: float = NAN) -> EnergyRecord:
    t = state.t
    common = dict(t=t, E=wave_energy(state), E_C=conformal_charge(state), E_ell=_local_energy(state, t))
    if isinstance(state, MaxwellModeState):
        return EnergyRecord(
            **common,
            E_T=maxwell_energy(state),
            E_K=conformal_energy(state),
            trap=maxwell_trapping_rate(state),
            trap_integral=trap_integral,
            constraint=state.constraint_norm(),
        )
    return EnergyRecord(**common, trap=wave_trapping_rate(state), trap_integral=trap_integral)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def _series(trajectory, name):
    return np.array([getattr(r, name) for r in trajectory.records])


def identity_terms(trajectory, i1: int = 0, i2: int = -1) -> dict:
    """Both sides of the relevant trapping identity between two records.

    Scalar runs: Delta E_C against int int t V T l(l+1)|u|^2.
    Maxwell runs: Delta E_K against int int 2 t V T |Psi_0|^2.
    """
    recs = trajectory.records
    if len(recs) < 2:
        raise InsufficientDataError("identity check needs at least two records")
    a, b = recs[i1], recs[i2]
    key = "E_K" if trajectory.kind == "maxwell" else "E_C"
    delta = getattr(b, key) - getattr(a, key)
    integral = b.trap_integral - a.trap_integral
    return {"functional": key, "delta": delta, "integral": integral, "start": getattr(a, key)}


def trapping_identity_residual(trajectory, i1: int = 0, i2: int = -1, eps: float = 1e-300) -> float:
    """|Delta E - int int rate| / max(E(t1), eps)."""
    d = identity_terms(trajectory, i1, i2)
    return abs(d["delta"] - d["integral"]) / max(abs(d["start"]), eps)


def uniform_bound_ratio(trajectory) -> float:
    """sup_t E_C(t) / (E_C(0) + l^2 (l+1)^2 E(0))."""
    EC = _series(trajectory, "E_C")
    E0 = trajectory.records[0].E
    denom = EC[0] + laplacian_squared_weight(trajectory.mode.l) * E0
    return float(EC.max() / denom) if denom > 0 else 0.0


def energy_relation_check(trajectory) -> dict:
    """E[Psi_0](t) <= C l(l+1) E_T(t) at every record; reports the smallest such C.

    E[Psi_0] uses dPsi_0/dt from the compacted equations and a centred
    difference for dPsi_0/dr_*.
    """
    if trajectory.kind != "maxwell":
        raise ConfigurationError("energy relation needs a Maxwell trajectory")
    w = poincare_gap(trajectory.mode.l)
    E0 = _series(trajectory, "E")
    ET = _series(trajectory, "E_T")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ET > 0, E0 / (w * ET), 0.0)
    C = float(ratio.max()) if ratio.size else 0.0
    return {"C": C, "weight": w, "ratios": ratio, "holds_with_C2": bool(C <= 2.0)}


# ---------------------------------------------------------------------------
# hypersurfaces
# ---------------------------------------------------------------------------

_KINDS = ("parabola", "cone", "slice")


@dataclass(frozen=True)
class HypersurfaceSpec:
    """t = sqrt(1 + r_*^2) + t0, t = |r_*| + t0 or t = t0."""

    kind: str
    t0: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"surface kind must be one of {_KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.t0) and self.t0 >= 0):
            raise ConfigurationError("surface offset t0 must be finite and >= 0")

    def time(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "parabola":
            return np.sqrt(1.0 + x * x) + self.t0
        if self.kind == "cone":
            return np.abs(x) + self.t0
        return np.full_like(x, self.t0)

    def slope(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "parabola":
            return x / np.sqrt(1.0 + x * x)
        if self.kind == "cone":
            return np.sign(x)
        return np.zeros_like(x)


def hypersurface_flux(trajectory, surface: HypersurfaceSpec, which: str = "T", interp: str = "linear") -> float:
    """Flux of T_ab X^b through ``surface`` for X = T or X = K.

    With conormal dt - tau' dr_* and transverse vector d_t the integrand is
    r^2 (T_0b X^b + tau' T_1b X^b).  Stored components are interpolated in t,
    linearly by default or, with ``interp="hermite"``, by cubic Hermite
    polynomials whose time derivatives come from the evolution equations.
    """
    if trajectory.kind != "maxwell":
        raise ConfigurationError("fluxes are defined for Maxwell trajectories")
    if which not in ("T", "K"):
        raise ConfigurationError("which must be 'T' or 'K'")
    if interp not in ("linear", "hermite"):
        raise ConfigurationError("interp must be 'linear' or 'hermite'")
    states = trajectory.states
    if not states:
        raise InsufficientDataError("flux needs stored states (keep_states=True)")
    ts = trajectory.times
    grid = states[0].grid
    x = grid.r_star
    tau = surface.time(x)
    slope = surface.slope(x)
    if tau.min() < ts[0] - 1e-12 or tau.max() > ts[-1] + 1e-12:
        raise CoverageError(
            f"surface spans t in [{tau.min():g}, {tau.max():g}], stored range is [{ts[0]:g}, {ts[-1]:g}]"
        )
    if surface.kind == "slice":
        k = int(np.argmin(np.abs(ts - surface.t0)))
        if abs(ts[k] - surface.t0) <= 1e-9 * max(1.0, abs(surface.t0)):
            s = states[k]
            return maxwell_energy(s) if which == "T" else conformal_energy(s, surface.t0)
    idx = np.clip(np.searchsorted(ts, tau, side="right") - 1, 0, len(ts) - 2)
    if interp == "hermite":
        p1, p0, pm = _hermite_components(states, ts, idx, tau)
    else:
        w = (tau - ts[idx]) / (ts[idx + 1] - ts[idx])
        nodes = np.arange(x.size)
        comps = []
        for name in ("psi_plus", "psi_zero", "psi_minus"):
            a = np.stack([getattr(s, name) for s in states])
            comps.append((1.0 - w) * a[idx, nodes] + w * a[idx + 1, nodes])
        p1, p0, pm = comps
    a1, a0, am = np.abs(p1) ** 2, grid.V * np.abs(p0) ** 2, np.abs(pm) ** 2
    T00 = 0.25 * (a1 + 2.0 * a0 + am)
    T01 = 0.25 * (a1 - am)
    T11 = 0.25 * (a1 - 2.0 * a0 + am)
    if which == "T":
        X0, X1 = 1.0, 0.0
    else:
        X0, X1 = tau * tau + x * x, 2.0 * tau * x
    integrand = (T00 * X0 + T01 * X1) + slope * (T01 * X0 + T11 * X1)
    return grid.integrate(integrand)


def _hermite_components(states, ts, idx, tau):
    """Spin components at time tau[j] on node j, cubic Hermite in t between records."""
    from .evolution import maxwell_rhs

    n = tau.size
    out = [np.empty(n, dtype=complex) for _ in range(3)]
    cache = {}

    def data(k):
        if k not in cache:
            s = states[k]
            cache[k] = (s.components, maxwell_rhs(*s.components, s.grid, s.mode.l))
        return cache[k]

    for i in np.unique(idx):
        m = idx == i
        dt = ts[i + 1] - ts[i]
        w = (tau[m] - ts[i]) / dt
        h00 = (1.0 + 2.0 * w) * (1.0 - w) ** 2
        h10 = w * (1.0 - w) ** 2
        h01 = w * w * (3.0 - 2.0 * w)
        h11 = w * w * (w - 1.0)
        (ya, da), (yb, db) = data(i), data(i + 1)
        for c in range(3):
            out[c][m] = h00 * ya[c][m] + h10 * dt * da[c][m] + h01 * yb[c][m] + h11 * dt * db[c][m]
        cache.pop(i - 1, None)
    return out


# ---------------------------------------------------------------------------
# decay and Hardy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    sup_t_value: float
    t_at_sup: float
    n_points: int


def decay_fit(t, values) -> DecayFit:
    """Log-log slope and sup of t * value over a decay series (zeros dropped)."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = (t > 0) & (v > 0) & np.isfinite(v)
    t, v = t[keep], v[keep]
    if t.size < 8:
        raise FitError(f"need at least 8 positive points, got {t.size}")
    if np.ptp(np.log(t)) == 0:
        raise FitError("all sample times coincide")
    slope, intercept = np.polyfit(np.log(t), np.log(v), 1)
    tv = t * v
    k = int(np.argmax(tv))
    return DecayFit(float(slope), float(intercept), float(tv[k]), float(t[k]), int(t.size))


def hardy_check(u, x, sigma: float, t: float, xi) -> dict:
    """Ratio of the two sides of the weighted Hardy inequality on |x| <= t/2.

    lhs = int u^2 / (1 + x^2)^(sigma+1); rhs = int u_x^2/(1 + x^2)^sigma + xi u^2.
    ``xi`` is an array on ``x`` or a callable.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u)
    if not sigma > 0:
        raise ConfigurationError("sigma must be positive")
    if not t >= 1:
        raise ConfigurationError("t must be >= 1")
    xi_v = np.asarray(xi(x) if callable(xi) else xi, dtype=float)
    core = np.abs(x) <= 0.5
    if np.any(xi_v < 0):
        raise ConfigurationError("xi must be non-negative")
    pos = core & (xi_v > 0)
    if not np.any(pos[:-1] & pos[1:]):
        raise ConfigurationError("xi must be positive on a subinterval of |r_*| <= 1/2")
    h = x[1] - x[0]
    ux = d_dx(u, h)
    m = np.abs(x) <= 0.5 * t
    w = 1.0 + x[m] ** 2
    a2 = np.abs(u[m]) ** 2
    lhs = float(np.trapezoid(a2 / w ** (sigma + 1.0), x[m]))
    rhs = float(np.trapezoid(np.abs(ux[m]) ** 2 / w**sigma + xi_v[m] * a2, x[m]))
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return {"lhs": lhs, "rhs_coreless": rhs, "ratio": ratio}


def core_bump(x, half_width: float = 0.25):
    """The C^2 weight (1 - (x/a)^2)^3 on |x| < a, a default choice of xi."""
    y = np.asarray(x, dtype=float) / half_width
    return np.where(np.abs(y) < 1.0, (1.0 - y * y) ** 3, 0.0)


def pointwise_bound(trajectory, probes: Sequence[float] = (-5.0, 0.0, 5.0), t_min: float = 20.0, t_max: Optional[float] = None) -> dict:
    """sup over [t_min, t_max] of t * (|Psi_1| + |Psi_0| + |Psi_-1|) at each probe."""
    if not trajectory.states:
        raise InsufficientDataError("pointwise bound needs stored states")
    ts = trajectory.times
    t_max = ts[-1] if t_max is None else t_max
    sel = [i for i, t in enumerate(ts) if t_min <= t <= t_max]
    if len(sel) < 8:
        raise InsufficientDataError("fewer than 8 records in the requested window")
    x = trajectory.states[0].grid.r_star
    out = {}
    for p in probes:
        j = int(np.argmin(np.abs(x - p)))
        amp = np.array([
            abs(trajectory.states[i].psi_plus[j]) + abs(trajectory.states[i].psi_zero[j]) + abs(trajectory.states[i].psi_minus[j])
            for i in sel
        ])
        tt = ts[sel]
        k = int(np.argmax(tt * amp))
        out[float(p)] = {"sup": float(tt[k] * amp[k]), "t_at_sup": float(tt[k]), "t": tt, "amplitude": amp}
    return out
