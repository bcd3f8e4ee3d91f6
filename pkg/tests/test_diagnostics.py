import numpy as np
import pytest
from scipy.integrate import quad
from hypothesis import given, settings
from hypothesis import strategies as st

from rnds_maxwell.diagnostics import (
    HypersurfaceSpec,
    conformal_charge,
    conformal_density,
    conformal_density_direct,
    conformal_energy,
    core_bump,
    decay_fit,
    energy_relation_check,
    hardy_check,
    hypersurface_flux,
    identity_terms,
    local_energy,
    maxwell_energy,
    pointwise_bound,
    trapping_identity_residual,
    uniform_bound_ratio,
    wave_energy,
)
from rnds_maxwell.errors import ConfigurationError, CoverageError, DomainError, FitError, InsufficientDataError
from rnds_maxwell.evolution import EvolutionConfig, evolve_maxwell, evolve_wave
from rnds_maxwell.fields import Gaussian, Grid, Samples, make_maxwell_state, make_wave_state
from rnds_maxwell.geometry import BlackHoleParams, GeometryMap


@pytest.fixture(scope="module")
def grid():
    return Grid.from_spacing(GeometryMap(BlackHoleParams(1.0, 0.5, 0.01)), 80.0, 0.1)


@pytest.fixture(scope="module")
def maxwell_traj(grid):
    s = make_maxwell_state(1, grid, Gaussian())
    return evolve_maxwell(s, EvolutionConfig(t_end=24.0, record_every=2))


@pytest.fixture(scope="module")
def wave_traj(grid):
    return evolve_wave(make_wave_state(1, grid, Gaussian()), EvolutionConfig(t_end=20.0, record_every=5))


# -- pointwise functionals --------------------------------------------------------


def test_wave_energy_free_gaussian(grid):
    # V off, u = exp(-x^2/2), u_t = 0: E = 1/2 int x^2 e^{-x^2} = sqrt(pi)/4
    g = Grid.from_spacing(grid.geometry, 80.0, 0.025).without_potential()
    s = make_wave_state(1, g, Gaussian())
    assert wave_energy(s) == pytest.approx(np.sqrt(np.pi) / 4, rel=5e-4)


@given(st.floats(0.0, 30.0), st.floats(-1.0, 1.0), st.floats(0.5, 1.0))
@settings(max_examples=25, deadline=None)
def test_conformal_density_forms_agree(t, c, w):
    g = Grid.from_spacing(GeometryMap(BlackHoleParams(1.0, 0.5, 0.01)), 80.0, 0.1)
    s = make_wave_state(2, g, Gaussian(c, w), ut_profile=Gaussian(c + 0.5, w, 0.4))
    a, b = conformal_density(s, t), conformal_density_direct(s, t)
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_conformal_charge_dominates_energy(grid):
    s = make_wave_state(1, grid, Gaussian(2.0))
    for t in (0.0, 1.0, 10.0):
        assert conformal_charge(s, t) >= wave_energy(s)


def test_local_energy_window(grid):
    s = make_wave_state(1, grid, Gaussian())
    with pytest.raises(DomainError):
        local_energy(s, 0.0)
    # the window |x| <= 3t/4 holds essentially all the energy at t = 20
    assert local_energy(s, 20.0) == pytest.approx(2 * wave_energy(s), rel=1e-10)
    assert local_energy(s, 1.0) < local_energy(s, 20.0)


def test_maxwell_energies_at_t0(grid):
    s = make_maxwell_state(1, grid, Gaussian())
    x = grid.r_star
    dens = 0.25 * (np.abs(s.psi_plus) ** 2 + 2 * grid.V * np.abs(s.psi_zero) ** 2 + np.abs(s.psi_minus) ** 2)
    assert maxwell_energy(s) == pytest.approx(grid.integrate(dens))
    # at t = 0 the weights (t +- x)^2 both equal x^2
    assert conformal_energy(s, 0.0) == pytest.approx(grid.integrate(x * x * dens), rel=1e-12)


# -- identities on short runs ----------------------------------------------------


def test_identity_terms_keys(wave_traj, maxwell_traj):
    t = identity_terms(wave_traj)
    assert t["functional"] == "E_C"
    assert identity_terms(maxwell_traj)["functional"] == "E_K"


def test_conformal_charge_identity_short_run(wave_traj):
    t = identity_terms(wave_traj)
    assert abs(t["delta"] - t["integral"]) / abs(t["delta"]) < 1e-2


def test_conformal_energy_identity_converges(grid):
    errs = []
    for h in (0.1, 0.05):
        g = Grid.from_spacing(grid.geometry, 80.0, h)
        tr = evolve_maxwell(make_maxwell_state(1, g, Gaussian()), EvolutionConfig(t_end=24.0, keep_states=False))
        t = identity_terms(tr)
        errs.append(abs(t["delta"] - t["integral"]) / abs(t["delta"]))
    assert errs[1] < 0.05
    assert errs[0] / errs[1] > 3.0


def test_uniform_bound_ratio(wave_traj):
    r = uniform_bound_ratio(wave_traj)
    assert 0 < r < 10


def test_energy_relation(maxwell_traj, wave_traj):
    out = energy_relation_check(maxwell_traj)
    assert out["holds_with_C2"]
    assert out["C"] > 0
    with pytest.raises(ConfigurationError):
        energy_relation_check(wave_traj)


def test_identity_needs_two_records(grid):
    tr = evolve_wave(make_wave_state(1, grid, Gaussian()), EvolutionConfig(t_end=0.05))
    tr.records = tr.records[:1]
    with pytest.raises(InsufficientDataError):
        identity_terms(tr)


# -- hypersurfaces ------------------------------------------------------------------


def test_surface_spec_validation():
    with pytest.raises(ConfigurationError):
        HypersurfaceSpec("hyperbola", 1.0)
    with pytest.raises(ConfigurationError):
        HypersurfaceSpec("cone", -1.0)
    p = HypersurfaceSpec("parabola", 2.0)
    assert p.time(0.0) == 3.0
    assert p.slope(np.array([-1e6, 1e6])) == pytest.approx([-1, 1])


def test_slice_flux_is_the_energy(maxwell_traj):
    s = maxwell_traj.states[5]
    assert hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", s.t)) == maxwell_energy(s)
    assert hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", s.t), "K") == conformal_energy(s)


def test_slice_flux_between_records_interpolates(maxwell_traj):
    ts = maxwell_traj.times
    tm = 0.5 * (ts[4] + ts[5])
    E = maxwell_energy(maxwell_traj.states[4])
    lin = hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", tm))
    herm = hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", tm), interp="hermite")
    # linear interpolation in t loses O(dt^2) of the energy between records
    assert lin == pytest.approx(E, rel=2e-2)
    assert herm == pytest.approx(E, rel=1e-4)
    with pytest.raises(ConfigurationError):
        hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", tm), interp="spline")


def test_flux_coverage(maxwell_traj):
    with pytest.raises(CoverageError):
        hypersurface_flux(maxwell_traj, HypersurfaceSpec("parabola", 1.0))
    with pytest.raises(ConfigurationError):
        hypersurface_flux(maxwell_traj, HypersurfaceSpec("slice", 1.0), "X")


def test_flux_free_field_cone(grid):
    # V = 0: Psi_1 is transported left and Psi_-1 right, so the cone flux is
    # 1/4 int_{y > t0} |Psi_1(0, y)|^2 + 1/4 int_{y < -t0} |Psi_-1(0, y)|^2
    g = Grid.from_spacing(grid.geometry, 20.0, 0.025).without_potential()
    x = g.r_star
    s = make_maxwell_state(1, g, Samples(np.exp(-0.5 * x * x)), ut_profile=Samples(0.7 * np.exp(-0.5 * (x - 0.5) ** 2)))
    t0 = 0.5
    tr = evolve_maxwell(s, EvolutionConfig(t_end=21.0, record_every=4))
    F = hypersurface_flux(tr, HypersurfaceSpec("cone", t0), interp="hermite")
    pt = lambda y: 0.7 * np.exp(-0.5 * (y - 0.5) ** 2)
    dp = lambda y: -y * np.exp(-0.5 * y * y)
    c = np.sqrt(2.0)
    want = 0.25 * quad(lambda y: ((pt(y) + dp(y)) / c) ** 2, t0, np.inf)[0]
    want += 0.25 * quad(lambda y: ((pt(y) - dp(y)) / c) ** 2, -np.inf, -t0)[0]
    assert F == pytest.approx(want, rel=1e-3)


# -- decay fits, Hardy, pointwise ---------------------------------------------------


def test_decay_fit_recovers_power():
    t = np.geomspace(1, 100, 30)
    fit = decay_fit(t, 3 * t**-2)
    assert fit.slope == pytest.approx(-2)
    assert fit.intercept == pytest.approx(np.log(3))
    assert fit.t_at_sup == 1.0


def test_decay_fit_errors():
    with pytest.raises(FitError):
        decay_fit(np.arange(1, 6), np.ones(5))
    with pytest.raises(FitError):
        decay_fit(np.ones(10), np.ones(10))


def test_core_bump():
    x = np.linspace(-1, 1, 401)
    b = core_bump(x)
    assert b.max() == 1.0 and np.all(b[np.abs(x) >= 0.25] == 0)


def test_hardy_check_validation():
    x = np.linspace(-5, 5, 201)
    u = np.exp(-x * x)
    with pytest.raises(ConfigurationError):
        hardy_check(u, x, 0.0, 10, core_bump)
    with pytest.raises(ConfigurationError):
        hardy_check(u, x, 1.0, 0.5, core_bump)
    with pytest.raises(ConfigurationError):
        hardy_check(u, x, 1.0, 10, lambda y: -np.ones_like(y))
    with pytest.raises(ConfigurationError):
        hardy_check(u, x, 1.0, 10, lambda y: (np.abs(y - 2) < 0.1).astype(float))


@given(st.floats(-3, 3), st.floats(0.5, 4.0))
@settings(max_examples=30, deadline=None)
def test_hardy_ratio_bounded(c, w):
    x = np.linspace(-5, 5, 401)
    out = hardy_check(np.exp(-0.5 * ((x - c) / w) ** 2), x, 1.0, 10.0, core_bump)
    assert 0 < out["ratio"] < 10


def test_pointwise_bound(maxwell_traj):
    out = pointwise_bound(maxwell_traj, probes=(0.0,), t_min=5.0)
    d = out[0.0]
    assert d["sup"] == pytest.approx(np.max(d["t"] * d["amplitude"]))
    with pytest.raises(InsufficientDataError):
        pointwise_bound(maxwell_traj, t_min=23.9)
