"""Time stepping for a single mode.

The scalar equation u_tt = u_xx - l(l+1) V u is advanced with the three-level
leapfrog scheme.  The first-order Maxwell system

    (d_t - d_x) Psi_1  =  V c_plus Psi_0
    d_t Psi_0          =  (c_minus Psi_1 - c_prime Psi_-1) / 2
    (d_t + d_x) Psi_-1 = -V c_dprime Psi_0

is advanced with classical RK4 in the method of lines.  Both use
second-order centred differences in r_* and outflow conditions at the edges,
where V is exponentially small.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .diagnostics import (
    EnergyRecord,
    maxwell_trapping_rate,
    record_for_state,
    wave_trapping_rate,
)
from .errors import (
    ConfigurationError,
    ConstraintBlowupError,
    InstabilityError,
    InsufficientDataError,
)
from .fields import Grid, MaxwellModeState, WaveModeState, d_dx, d2_dx2
from .harmonics import ModeIndex, coupling_constants, poincare_gap

CSV_HEADER = ("t", "E", "E_C", "E_ell", "E_T", "E_K", "trap_density_integral", "constraint_norm")


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-stepping controls.

    The step is the largest dt <= dt_factor * h that divides t_end into a whole
    number of steps, so the last record sits exactly at t_end.
    """

    t_end: float
    dt_factor: float = 0.9
    record_every: int = 1
    boundary: str = "outflow"
    keep_states: bool = True
    constraint_ceiling: float = math.inf

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigurationError("t_end must be positive")
        if not (0 < self.dt_factor <= 1):
            raise ConfigurationError(f"dt_factor must lie in (0, 1], got {self.dt_factor}")
        if not (isinstance(self.record_every, (int, np.integer)) and self.record_every >= 1):
            raise ConfigurationError("record_every must be a positive integer")
        if self.boundary != "outflow":
            raise ConfigurationError(f"unsupported boundary {self.boundary!r}; only 'outflow'")


def cfl_dt(h, dt_factor: float) -> float:
    """dt = dt_factor * h; accepts a grid or a spacing."""
    if not (0 < dt_factor <= 1):
        raise ConfigurationError(f"dt_factor must lie in (0, 1], got {dt_factor}")
    h = h.h if isinstance(h, Grid) else float(h)
    return dt_factor * h


def step_count(grid: Grid, config: EvolutionConfig):
    n = int(math.ceil(config.t_end / cfl_dt(grid, config.dt_factor) - 1e-9))
    n = max(n, 1)
    return n, config.t_end / n


def causal_window(t_end: float, support_half_width: float, margin: float = 5.0) -> float:
    """Half-width L keeping the edges out of causal contact with the data up to t_end."""
    return support_half_width + t_end + margin


@dataclass
class Trajectory:
    kind: str
    mode: ModeIndex
    grid: Grid = field(repr=False)
    dt: float
    records: List[EnergyRecord] = field(default_factory=list, repr=False)
    states: list = field(default_factory=list, repr=False)
    final_state: object = field(default=None, repr=False)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @classmethod
    def from_states(cls, states, kind: Optional[str] = None) -> "Trajectory":
        """Trajectory from stored states; the trapping integral uses the trapezoid rule on their times."""
        if not states:
            raise InsufficientDataError("no states")
        kind = kind or ("maxwell" if isinstance(states[0], MaxwellModeState) else "wave")
        times = np.array([s.t for s in states])
        if np.any(np.diff(times) <= 0):
            raise ConfigurationError("state times must be strictly increasing")
        rate = maxwell_trapping_rate if kind == "maxwell" else wave_trapping_rate
        rates = np.array([rate(s) for s in states])
        integ = np.concatenate([[0.0], np.cumsum(0.5 * (rates[1:] + rates[:-1]) * np.diff(times))])
        records = [record_for_state(s, float(I)) for s, I in zip(states, integ)]
        dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
        return cls(kind, states[0].mode, states[0].grid, dt, records, list(states), states[-1])

    def rows(self):
        for r in self.records:
            yield (r.t, r.E, r.E_C, r.E_ell, r.E_T, r.E_K, r.trap_integral, r.constraint)

    def to_csv(self, dest) -> None:
        """Write the energy table; non-applicable columns are written as nan."""
        def _write(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])

        if hasattr(dest, "write"):
            _write(dest)
        else:
            with open(dest, "w", newline="") as fh:
                _write(fh)


def read_trajectory_csv(src) -> dict:
    """Columns of an exported energy table as float arrays."""
    fh = open(src) if not hasattr(src, "read") else src
    try:
        rows = list(csv.reader(fh))
    finally:
        if fh is not src:
            fh.close()
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return {h: data[:, k] for k, h in enumerate(header)}


# far beyond any physical amplitude, and small enough that squares stay finite
_BLOWUP = 1e100


def _check_finite(arr, step: int):
    peak = np.max(np.abs(arr))
    if not (np.isfinite(peak) and peak < _BLOWUP):
        raise InstabilityError(f"solution blew up (max |u| = {peak:.3g}) at step {step}", step)


# ---------------------------------------------------------------------------
# scalar wave
# ---------------------------------------------------------------------------


def evolve_wave(state: WaveModeState, config: EvolutionConfig) -> Trajectory:
    """Leapfrog evolution of one scalar mode.

    Edges use the box-scheme discretisation of (d_t -+ d_x) u = 0.  Recorded
    u_t is the centred difference (u^{n+1} - u^{n-1}) / 2dt.
    """
    grid = state.grid
    n_steps, dt = step_count(grid, config)
    h = grid.h
    nu = dt / h
    W = poincare_gap(state.mode.l) * grid.V
    x_trap = grid.V * grid.trap * poincare_gap(state.mode.l)

    def accel(u):
        return d2_dx2(u, h) - W * u

    def edges(new, old):
        c = (1.0 - nu) / (1.0 + nu)
        new[0] = c * old[0] + old[1] - c * new[1]
        new[-1] = c * old[-1] + old[-2] - c * new[-2]

    t0 = state.t
    prev = np.array(state.u, dtype=complex)
    cur = prev + dt * state.ut + 0.5 * dt * dt * accel(prev)
    edges(cur, prev)

    def rate(u, t):
        return t * grid.integrate(x_trap * np.abs(u) ** 2)

    traj = Trajectory("wave", state.mode, grid, dt)
    integral = 0.0
    last_rate = rate(prev, t0)
    traj.records.append(record_for_state(state, 0.0))
    if config.keep_states:
        traj.states.append(state)
    ut_prev = np.array(state.ut)
    for n in range(1, n_steps + 1):
        nxt = 2.0 * cur - prev + dt * dt * accel(cur)
        edges(nxt, cur)
        _check_finite(nxt, n + 1)
        t = t0 + n * dt
        r_now = rate(cur, t)
        integral += 0.5 * dt * (last_rate + r_now)
        last_rate = r_now
        if n % config.record_every == 0 or n == n_steps:
            s = WaveModeState(state.mode, grid, t, cur, (nxt - prev) / (2.0 * dt))
            traj.records.append(record_for_state(s, integral))
            if config.keep_states:
                traj.states.append(s)
            traj.final_state = s
        prev, cur = cur, nxt
    if traj.final_state is None:
        traj.final_state = state
    return traj


# ---------------------------------------------------------------------------
# Maxwell
# ---------------------------------------------------------------------------


def maxwell_rhs(p1, p0, pm, grid: Grid, l: int):
    c = coupling_constants(l)
    V = grid.V
    h = grid.h
    r1 = d_dx(p1, h) + V * c.c_plus * p0
    r0 = 0.5 * (c.c_minus * p1 - c.c_prime * pm)
    rm = -d_dx(pm, h) - V * c.c_dprime * p0
    # incoming characteristics carry nothing in from outside the window
    r1[-1] = 0.0
    rm[0] = 0.0
    return r1, r0, rm


def evolve_maxwell(state: MaxwellModeState, config: EvolutionConfig) -> Trajectory:
    """RK4 method-of-lines evolution of one Maxwell mode."""
    grid = state.grid
    l = state.mode.l
    n_steps, dt = step_count(grid, config)
    y = [np.array(state.psi_plus), np.array(state.psi_zero), np.array(state.psi_minus)]

    def F(z):
        return maxwell_rhs(z[0], z[1], z[2], grid, l)

    def axpy(z, k, a):
        return [zi + a * ki for zi, ki in zip(z, k)]

    t0 = state.t
    traj = Trajectory("maxwell", state.mode, grid, dt)
    first = record_for_state(state, 0.0)
    traj.records.append(first)
    if config.keep_states:
        traj.states.append(state)
    if first.constraint > config.constraint_ceiling:
        raise ConstraintBlowupError(f"constraint {first.constraint:g} above ceiling at step 0", 0)
    integral = 0.0
    last_rate = maxwell_trapping_rate(state)
    trapV = grid.V * grid.trap
    for n in range(1, n_steps + 1):
        k1 = F(y)
        k2 = F(axpy(y, k1, 0.5 * dt))
        k3 = F(axpy(y, k2, 0.5 * dt))
        k4 = F(axpy(y, k3, dt))
        y = [yi + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)]
        _check_finite(y[1], n)
        t = t0 + n * dt
        r_now = 2.0 * t * grid.integrate(trapV * np.abs(y[1]) ** 2)
        integral += 0.5 * dt * (last_rate + r_now)
        last_rate = r_now
        if n % config.record_every == 0 or n == n_steps:
            _check_finite(y[0], n)
            _check_finite(y[2], n)
            s = MaxwellModeState(state.mode, grid, t, *y)
            rec = record_for_state(s, integral)
            if rec.constraint > config.constraint_ceiling:
                raise ConstraintBlowupError(
                    f"constraint {rec.constraint:g} above ceiling {config.constraint_ceiling:g} at step {n}", n
                )
            traj.records.append(rec)
            if config.keep_states:
                traj.states.append(s)
            traj.final_state = s
    return traj


def evolve(state, config: EvolutionConfig) -> Trajectory:
    if isinstance(state, MaxwellModeState):
        return evolve_maxwell(state, config)
    return evolve_wave(state, config)


# ---------------------------------------------------------------------------
# time derivative of stored data
# ---------------------------------------------------------------------------


def lie_t_derivative(trajectory: Trajectory) -> Trajectory:
    """Centred time differences of the stored components (interior records only).

    Since d_t is Killing, the result is again a solution of the same mode
    equations, up to the O(dt_record^2) error of the difference.
    """
    states = trajectory.states
    if len(states) < 3:
        raise InsufficientDataError("time derivative needs at least 3 stored records")
    ts = np.array([s.t for s in states])
    d = np.diff(ts)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
        raise InsufficientDataError("stored records are not uniformly spaced in time")
    inv = 1.0 / (2.0 * d[0])
    out = []
    for i in range(1, len(states) - 1):
        a, b, s = states[i - 1], states[i + 1], states[i]
        comps = [(cb - ca) * inv for ca, cb in zip(a.components, b.components)]
        cls = type(s)
        out.append(cls(s.mode, s.grid, s.t, *comps))
    return Trajectory.from_states(out, trajectory.kind)
