import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnds_maxwell.errors import DomainError, ExcludedModeError
from rnds_maxwell.harmonics import (
    ModeIndex,
    coupling_constants,
    gradient_weight,
    laplacian_eigenvalue,
    laplacian_squared_weight,
    poincare_gap,
)


@pytest.mark.parametrize("l, ev", [(0, 0.0), (1, -2.0), (2, -6.0), (10, -110.0)])
def test_laplacian_eigenvalue(l, ev):
    assert laplacian_eigenvalue(l) == ev


def test_negative_l_rejected():
    with pytest.raises(DomainError):
        laplacian_eigenvalue(-1)
    with pytest.raises(DomainError):
        laplacian_eigenvalue(1.5)


@pytest.mark.parametrize("l", range(1, 65))
def test_coupling_products(l):
    c = coupling_constants(l)
    # squares are integers, so the products are exact up to one rounding
    assert c.c_minus * c.c_plus == pytest.approx(-l * (l + 1), rel=1e-15)
    assert c.c_prime * c.c_dprime == pytest.approx(-l * (l + 1), rel=1e-15)
    assert round(c.c_minus**2) == l * (l + 1)


def test_coupling_convention():
    c = coupling_constants(1)
    s = math.sqrt(2)
    assert (c.c_minus, c.c_prime, c.c_plus, c.c_dprime) == (s, s, -s, -s)
    assert coupling_constants(3).c_minus * coupling_constants(3).c_plus == pytest.approx(-12)


def test_l_zero_excluded():
    with pytest.raises(ExcludedModeError):
        coupling_constants(0)
    with pytest.raises(ExcludedModeError):
        poincare_gap(0)
    with pytest.raises(ExcludedModeError):
        ModeIndex(0)


@pytest.mark.parametrize("l, gap", [(1, 2.0), (2, 6.0), (5, 30.0)])
def test_poincare_gap(l, gap):
    assert poincare_gap(l) == gap
    # per-mode angular bound int u^2 <= 1/2 int |grad u|^2, sharp at l = 1
    assert 1.0 <= 0.5 * poincare_gap(l)


@given(st.integers(1, 500))
def test_weight_ordering(l):
    assert 1 <= gradient_weight(l) <= laplacian_squared_weight(l)
    assert laplacian_squared_weight(l) == gradient_weight(l) ** 2


@given(st.integers(1, 50), st.integers(-60, 60))
def test_mode_index_bounds(l, n):
    if abs(n) <= l:
        assert ModeIndex(l, n).n == n
    else:
        with pytest.raises(DomainError):
            ModeIndex(l, n)
