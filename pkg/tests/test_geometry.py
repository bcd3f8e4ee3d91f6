import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rnds_maxwell.errors import (
    DegenerateGeometryError,
    DomainError,
    InadmissibleParametersError,
    InvalidInputError,
)
from rnds_maxwell.geometry import (
    CLAUSE_CHARGE,
    CLAUSE_LAMBDA,
    CLAUSE_MASS,
    BlackHoleParams,
    GeometryMap,
    chi_trap,
    generic_f_validate,
    horizon_function,
    horizon_roots,
    orbit_residual,
    photon_sphere,
    potential,
    r_of_r_star,
    r_star_of_r,
    rw_coefficients,
    trapping_region,
    trapping_term,
    validate_params,
)
from rnds_maxwell.oracles import quartic_roots_companion

# Reference values for (M, Q, Lambda) = (1, 0.5, 0.01), frozen from the
# independent QR root oracle (see test_roots_match_oracle).
R0, R1, R2, R3 = -10.889326920484319, 0.13397273625122857, 1.9450550104851592, 8.81029917374793
P2_REF = 2.8228756555322954
A_REF = (4.254588062473692, -0.010362085657283889, 2.370798537525684, -6.615024514342092)
OFFSET_REF = 1.0181190154668194
TRAP_REF = (-5.998783359650361, 11.884833006045938)


@st.composite
def admissible(draw):
    Q = draw(st.floats(0.05, 2.0))
    lam = draw(st.floats(0.02, 0.9)) / (12 * Q * Q)
    rep = validate_params(1.0, Q, lam)
    frac = draw(st.floats(0.05, 0.95))
    M = rep.M1 + frac * (rep.M2 - rep.M1)
    return M, Q, lam


# -- admissibility -------------------------------------------------------------


def test_reference_is_admissible():
    rep = validate_params(1.0, 0.5, 0.01)
    assert rep.admissible
    assert rep.Delta == pytest.approx(0.97)
    assert rep.M1 == pytest.approx(0.499371, abs=1e-6)
    assert rep.M2 == pytest.approx(1.946192, abs=1e-6)


@pytest.mark.parametrize(
    "M, Q, lam, clause",
    [
        (1.0, 0.0, 0.01, CLAUSE_CHARGE),
        (1.0, 0.5, 0.0, CLAUSE_LAMBDA),
        (1.0, 0.5, -0.01, CLAUSE_LAMBDA),
        (1.0, 0.5, 1 / 3, CLAUSE_LAMBDA),
        (1.0, 0.5, 0.2, CLAUSE_MASS),
        (3.0, 0.5, 0.01, CLAUSE_MASS),
        (0.3, 0.5, 0.01, CLAUSE_MASS),
    ],
)
def test_failed_clause_named(M, Q, lam, clause):
    rep = validate_params(M, Q, lam)
    assert not rep.admissible
    assert rep.failed_clause == clause
    with pytest.raises(InadmissibleParametersError) as exc:
        BlackHoleParams(M, Q, lam)
    assert exc.value.clause == clause


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(InvalidInputError):
        validate_params(bad, 0.5, 0.01)
    with pytest.raises(InvalidInputError):
        validate_params(1.0, 0.5, bad)


def test_mass_interval_edges():
    rep = validate_params(1.0, 0.5, 0.01)
    assert not validate_params(rep.M1, 0.5, 0.01).admissible
    assert not validate_params(rep.M2, 0.5, 0.01).admissible


@given(admissible())
@settings(max_examples=60, deadline=None)
def test_admissible_means_three_positive_horizons(p):
    M, Q, lam = p
    try:
        h = horizon_roots(BlackHoleParams(M, Q, lam))
    except DegenerateGeometryError:
        assume(False)
    assert h.r0 < 0 < h.r1 < h.r2 < h.r3
    assert h.r2 < h.P2 < h.r3


def test_near_extremal_rejected():
    rep = validate_params(1.0, 0.5, 0.01)
    with pytest.raises((DegenerateGeometryError, InadmissibleParametersError)):
        horizon_roots(BlackHoleParams(rep.M2 * (1 - 1e-13), 0.5, 0.01))


# -- horizon function and roots ---------------------------------------------------


def test_horizon_function_values(ref_params):
    f, fp, fpp = horizon_function(ref_params, 2.0)
    assert f == pytest.approx(0.0225, abs=1e-15)
    assert fp == pytest.approx(0.3975, abs=1e-15)
    assert fpp == pytest.approx(-4 / 8 + 6 * 0.25 / 16 - 0.02, abs=1e-15)


def test_horizon_function_domain(ref_params):
    with pytest.raises(DomainError):
        horizon_function(ref_params, 0.0)
    with pytest.raises(DomainError):
        horizon_function(ref_params, np.array([1.0, -1.0]))


def test_reference_roots(ref_params):
    h = horizon_roots(ref_params)
    np.testing.assert_allclose(h.roots, [R0, R1, R2, R3], rtol=1e-13)
    for r in h.roots[1:]:
        assert abs(horizon_function(ref_params, r)[0]) < 1e-12


def test_roots_match_oracle(ref_params):
    own = quartic_roots_companion(*ref_params.quartic)
    assert np.max(np.abs(own.imag)) == 0
    np.testing.assert_allclose(own.real, horizon_roots(ref_params).roots, rtol=0, atol=1e-9)


def test_vieta(ref_params):
    r = horizon_roots(ref_params).roots
    lam = ref_params.Lambda
    assert abs(r.sum()) <= 1e-10 * np.abs(r).sum()
    e2 = sum(r[i] * r[j] for i in range(4) for j in range(i + 1, 4))
    assert e2 == pytest.approx(-1 / lam, rel=1e-10)
    assert np.prod(r) == pytest.approx(-ref_params.Q**2 / lam, rel=1e-10)


def test_photon_sphere(ref_params):
    P2 = photon_sphere(ref_params)
    assert P2 == pytest.approx(P2_REF, rel=1e-15)
    assert P2 == pytest.approx((3 + math.sqrt(7)) / 2, rel=1e-15)
    assert abs(orbit_residual(ref_params, P2)) < 1e-10


@given(admissible())
@settings(max_examples=40, deadline=None)
def test_photon_sphere_satisfies_orbit_condition(p):
    params = BlackHoleParams(*p)
    P2 = photon_sphere(params)
    _, fp, _ = horizon_function(params, P2)
    assert abs(orbit_residual(params, P2)) <= 1e-10 * max(1.0, abs(fp * P2))


def test_no_photon_sphere_when_charge_too_large():
    from types import SimpleNamespace

    with pytest.raises(DomainError):
        photon_sphere(SimpleNamespace(M=1.0, Q=1.2))


# -- tortoise coordinate --------------------------------------------------------------


def test_rw_coefficients(ref_params):
    h = horizon_roots(ref_params)
    a, off = rw_coefficients(h, ref_params.Lambda)
    np.testing.assert_allclose(a, A_REF, rtol=1e-12)
    assert off == pytest.approx(OFFSET_REF, rel=1e-12)


def test_partial_fractions(ref_geom):
    h = ref_geom.horizons
    r = np.linspace(h.r2, h.r3, 502)[1:-1]
    s = sum(ai / (r - ri) for ai, ri in zip(h.a, h.roots))
    f, _, _ = horizon_function(ref_geom.params, r)
    assert np.max(np.abs(s * f - 1)) < 1e-9


def test_r_star_zero_at_photon_sphere(ref_geom):
    assert abs(r_star_of_r(ref_geom, ref_geom.horizons.P2)) < 1e-14
    assert r_of_r_star(ref_geom, 0.0) == pytest.approx(P2_REF, rel=1e-14)


def test_r_star_monotone_and_finite_difference(ref_geom):
    h = ref_geom.horizons
    r = np.linspace(h.r2, h.r3, 1002)[1:-1]
    x = r_star_of_r(ref_geom, r)
    assert np.all(np.diff(x) > 0)
    r = np.linspace(h.r2 + 0.2, h.r3 - 0.5, 1000)
    x = r_star_of_r(ref_geom, r)
    f, _, _ = horizon_function(ref_geom.params, r[1:-1])
    d = (x[2:] - x[:-2]) / (r[2:] - r[:-2])
    np.testing.assert_allclose(d * f, 1.0, rtol=5e-4)


def test_r_star_domain(ref_geom):
    with pytest.raises(DomainError):
        r_star_of_r(ref_geom, ref_geom.horizons.r2)
    with pytest.raises(DomainError):
        r_star_of_r(ref_geom, 9.0)


@given(st.floats(-40.0, 40.0))
@settings(max_examples=200, deadline=None)
def test_round_trip_r_star(x):
    from rnds_maxwell.geometry import GeometryMap as G

    geom = _REF_GEOM
    r = geom.r_of_r_star(x)
    assert abs(geom.r_star_of_r(r) - x) <= 1e-10 * max(1.0, abs(x))


@given(st.floats(0.0, 1.0, exclude_min=True, exclude_max=True))
@settings(max_examples=200, deadline=None)
def test_round_trip_r(u):
    h = _REF_GEOM.horizons
    r = h.r2 + u * (h.r3 - h.r2)
    assume(h.r2 < r < h.r3)
    x = _REF_GEOM.r_star_of_r(r)
    assert abs(_REF_GEOM.r_of_r_star(x) - r) <= 1e-10 * r


_REF_GEOM = GeometryMap(BlackHoleParams(1.0, 0.5, 0.01))


def test_far_tails_approach_horizons(ref_geom):
    # far out the radius rounds onto the horizon, so only f >= 0 survives
    s = ref_geom.sample(np.array([-ref_geom.L, ref_geom.L]))
    assert np.all(s.f < 1e-12)
    assert np.all(s.f >= 0)
    s = ref_geom.sample(np.array([-40.0, 40.0]))
    assert np.all(s.f > 0)
    assert ref_geom.horizons.r2 < s.r[0] < s.r[1] < ref_geom.horizons.r3


def test_inversion_vectorised_is_fast(ref_geom):
    import time

    x = np.linspace(-150, 150, 4001)
    t0 = time.perf_counter()
    ref_geom.r_of_r_star(x)
    assert time.perf_counter() - t0 < 0.5


# -- potential and trapping ---------------------------------------------------------


def test_potential_scaling(ref_geom):
    x = np.linspace(-20, 20, 81)
    V = potential(ref_geom, x, 0)
    np.testing.assert_allclose(potential(ref_geom, x, 1), 2 * V)
    np.testing.assert_allclose(potential(ref_geom, x, 3), 12 * V)
    assert np.all(V > 0)
    with pytest.raises(DomainError):
        potential(ref_geom, x, -1)


def test_potential_peaks_at_photon_sphere(ref_geom):
    assert abs(ref_geom.dV_dr_star(0.0)) < 1e-14
    x = np.linspace(-5, 5, 1001)
    assert abs(x[np.argmax(ref_geom.V(x))]) < 0.011


def test_dV_finite_difference(ref_geom):
    x = np.linspace(-10, 10, 41)
    d = 1e-5
    fd = (ref_geom.V(x + d) - ref_geom.V(x - d)) / (2 * d)
    np.testing.assert_allclose(ref_geom.dV_dr_star(x), fd, rtol=1e-7, atol=1e-12)


def test_trapping_term_equals_log_derivative_form(ref_geom):
    # T = 1 + r_* V'/(2V), the form both identities actually use
    x = np.linspace(-30, 30, 121)
    alt = 1 + x * ref_geom.dV_dr_star(x) / (2 * ref_geom.V(x))
    np.testing.assert_allclose(trapping_term(ref_geom, x), alt, rtol=1e-12, atol=1e-12)


def test_trapping_term_at_photon_sphere(ref_geom):
    assert trapping_term(ref_geom, 0.0) == 1.0


def test_trapping_region(ref_geom):
    left, right = trapping_region(ref_geom)
    assert left == pytest.approx(TRAP_REF[0], abs=1e-9)
    assert right == pytest.approx(TRAP_REF[1], abs=1e-9)
    assert trapping_term(ref_geom, left - 0.1) < 0 < trapping_term(ref_geom, left + 0.1)
    assert trapping_term(ref_geom, right + 0.1) < 0 < trapping_term(ref_geom, right - 0.1)


def test_chi_trap_dominates(ref_geom):
    chi = chi_trap(ref_geom, 0.05)
    x = np.linspace(-30, 30, 6001)
    target = 2 * ref_geom.V(x) * ref_geom.trapping(x)
    assert np.all(chi(x) >= target - 1e-12)
    assert chi(-29.0) == 0 and chi(29.0) == 0
    assert chi.support[0] < TRAP_REF[0] and chi.support[1] > TRAP_REF[1]


# -- generic horizon functions ---------------------------------------------------


def test_generic_f_accepts_rnds(ref_params):
    h = horizon_roots(ref_params)
    f = lambda r: horizon_function(ref_params, r)[0]
    fp = lambda r: horizon_function(ref_params, r)[1]
    rep = generic_f_validate(f, fp, h.r1, h.r2, h.r3)
    assert rep.passed, rep.conditions


def test_generic_f_schwarzschild_asymptotics():
    f = lambda r: 1 - 2 / np.asarray(r)
    fp = lambda r: 2 / np.asarray(r) ** 2
    rep = generic_f_validate(f, fp, None, 2.0, math.inf)
    assert rep.conditions["4_asymptotics"] == "pass"
    assert rep.passed


def test_generic_f_detects_double_root():
    f = lambda r: (np.asarray(r) - 1.0) ** 2 * (3.0 - np.asarray(r)) / 9
    fp = lambda r: (2 * (np.asarray(r) - 1) * (3 - np.asarray(r)) - (np.asarray(r) - 1) ** 2) / 9
    rep = generic_f_validate(f, fp, None, 1.0, 3.0)
    assert rep.conditions["2_simple_zeros"] == "fail"


def test_generic_f_detects_extra_zero():
    f = lambda r: np.sin(np.asarray(r))
    fp = lambda r: np.cos(np.asarray(r))
    rep = generic_f_validate(f, fp, None, math.pi, 2 * math.pi)
    assert rep.conditions["1_only_zeros"] == "fail"
    assert not rep.passed
