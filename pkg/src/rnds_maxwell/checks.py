"""The invariant suite behind ``rnds-maxwell check``.

Each check returns a :class:`CheckResult`; the suite passes iff all do.  The
evolution checks use a short, coarse run so the whole suite finishes in a
few seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import diagnostics as dg
from .evolution import EvolutionConfig, evolve_maxwell, evolve_wave
from .fields import Gaussian, Grid, make_maxwell_state, make_wave_state, stress_energy_components, stress_energy_null
from .geometry import BlackHoleParams, GeometryMap, horizon_function, orbit_residual
from .oracles import deformation_identity_check, quartic_roots_companion, refined_quadrature


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.threshold)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name},{status},{self.value:.6e},{self.threshold:.1e}"


def vieta_residual(geom: GeometryMap) -> float:
    """Worst relative mismatch of the four elementary symmetric functions of the roots."""
    r = np.array(geom.horizons.roots)
    p = geom.params
    e1 = r.sum()
    e2 = sum(r[i] * r[j] for i in range(4) for j in range(i + 1, 4))
    e3 = sum(r[i] * r[j] * r[k] for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4))
    e4 = np.prod(r)
    want = (0.0, -1.0 / p.Lambda, -2.0 * p.M / p.Lambda, -p.Q**2 / p.Lambda)
    scales = (np.abs(r).sum(), abs(want[1]), abs(want[2]), abs(want[3]))
    return float(max(abs(a - b) / s for a, b, s in zip((e1, e2, e3, e4), want, scales)))


def partial_fraction_residual(geom: GeometryMap, n: int = 200) -> float:
    """max |sum a_i/(r - r_i) - 1/f(r)| * f(r) over the exterior."""
    h = geom.horizons
    r = np.linspace(h.r2, h.r3, n + 2)[1:-1]
    a = np.array(h.a)
    roots = np.array(h.roots)
    s = np.sum(a[:, None] / (r[None, :] - roots[:, None]), axis=0)
    f, _, _ = horizon_function(geom.params, r)
    return float(np.max(np.abs(s * f - 1.0)))


def round_trip_residual(geom: GeometryMap, n: int = 401, x_max: float = 40.0) -> float:
    """Worst relative error of r -> r_* -> r and r_* -> r -> r_*.

    Far out in r_* the radius is within rounding of a horizon, so the second
    direction is sampled on |r_*| <= x_max only.
    """
    h = geom.horizons
    r = np.linspace(h.r2, h.r3, n + 2)[1:-1]
    e1 = np.max(np.abs(geom.r_of_r_star(geom.r_star_of_r(r)) - r) / r)
    x = np.linspace(-x_max, x_max, n)
    e2 = np.max(np.abs(geom.r_star_of_r(geom.r_of_r_star(x)) - x) / np.maximum(1.0, np.abs(x)))
    return float(max(e1, e2))


def stress_energy_residual(n: int = 1000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    c = lambda: rng.normal(size=n) + 1j * rng.normal(size=n)
    p1, p0, pm = c(), c(), c()
    r = rng.uniform(0.5, 10.0, n)
    f = rng.uniform(0.0, 1.0, n)
    T00, T01, T11 = stress_energy_components(p1, p0, pm, r, f)
    LL, LN, NN = stress_energy_null(p1, p0, pm, r, f)
    res = [
        LL - (T00 + 2 * T01 + T11),
        NN - (T00 - 2 * T01 + T11),
        LN - (T00 - T11),
        T00 - T11 - f * np.abs(p0) ** 2 / r**4,
    ]
    scale = T00 + np.abs(T01) + np.abs(T11)
    return float(max(np.max(np.abs(x) / scale) for x in res))


def run_suite(params: BlackHoleParams, trap_offset: float = 0.0, h: float = 0.05, L: float = 80.0, t_end: float = 20.0) -> List[CheckResult]:
    geom = GeometryMap(params, trap_offset=trap_offset)
    out = [
        CheckResult("geometry.vieta", vieta_residual(geom), 1e-10),
        CheckResult("geometry.partial_fractions", partial_fraction_residual(geom), 1e-9),
        CheckResult("geometry.round_trip", round_trip_residual(geom), 1e-10),
        CheckResult("geometry.photon_orbit", abs(orbit_residual(params, geom.horizons.P2)), 1e-10),
        CheckResult("fields.stress_energy_algebra", stress_energy_residual(), 1e-14),
    ]
    roots = quartic_roots_companion(*np.poly([1.0, 2.0, 3.0, -6.0]))
    out.append(CheckResult("oracles.quartic_selftest", float(np.max(np.abs(roots - np.array([-6, 1, 2, 3])))), 1e-12))
    own = quartic_roots_companion(*params.quartic).real
    out.append(CheckResult("oracles.quartic_vs_horizons", float(np.max(np.abs(own - np.array(geom.horizons.roots)))), 1e-9))
    q = refined_quadrature(lambda x: np.exp(-x * x), -20.0, 20.0, 401)
    out.append(CheckResult("oracles.quadrature_selftest", abs(q.value - math.sqrt(math.pi)), 1e-10))
    d = deformation_identity_check(geom, n_points=20)
    out.append(CheckResult("oracles.deformation_K", d["K_residual"], 1e-6))
    out.append(CheckResult("oracles.killing_T", d["T_killing"], 1e-8))

    grid = Grid.from_spacing(geom, L, h)
    cfg = EvolutionConfig(t_end=t_end, keep_states=False)
    bound = 5.0 * (h / 0.05) ** 2 * 1e-4
    wave = evolve_wave(make_wave_state(1, grid, Gaussian()), cfg)
    E = wave.series("E")
    out.append(CheckResult("evolution.wave_energy_drift", float(np.max(np.abs(E - E[0])) / E[0]), bound))
    t = dg.identity_terms(wave)
    out.append(CheckResult("diagnostics.conformal_charge_identity", abs(t["delta"] - t["integral"]) / abs(t["delta"]), 1e-2))
    EC, Ev = wave.series("E_C"), wave.series("E")
    out.append(CheckResult("diagnostics.conformal_dominates_energy", float(max(0.0, np.max(Ev - EC))), 0.0))

    mx = evolve_maxwell(make_maxwell_state(1, grid, Gaussian()), cfg)
    ET = mx.series("E_T")
    out.append(CheckResult("evolution.maxwell_energy_drift", float(np.max(np.abs(ET - ET[0])) / ET[0]), bound))
    t = dg.identity_terms(mx)
    out.append(CheckResult("diagnostics.conformal_energy_identity", abs(t["delta"] - t["integral"]) / abs(t["delta"]), 1e-2))
    return out
