import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contentq.specfun import chi_square_sf, chi_square_sf_many, regularized_gamma_q


def quad_sf(x, df):
    """Oracle: adaptive quadrature of the chi-square density."""
    mpmath.mp.dps = 30
    k = mpmath.mpf(df) / 2
    pdf = lambda t: t ** (k - 1) * mpmath.exp(-t / 2) / (2**k * mpmath.gamma(k))
    if x == 0:
        return 1.0
    if x < df:
        return float(1 - mpmath.quad(pdf, [0, x]))
    return float(mpmath.quad(pdf, [x, mpmath.inf]))


def test_matches_reported_p_value():
    assert chi_square_sf(8.7, 8) == pytest.approx(0.368, abs=1e-3)
    assert abs(chi_square_sf(8.7, 8) - 0.36) <= 0.01


def test_zero_is_certain():
    for k in range(1, 40):
        assert chi_square_sf(0, k) == 1.0


def test_five_percent_critical_value():
    assert quad_sf(15.507, 8) == pytest.approx(0.05, abs=1e-3)
    assert chi_square_sf(15.507, 8) == pytest.approx(quad_sf(15.507, 8), abs=1e-10)


@pytest.mark.parametrize("df", [1, 2, 3, 7, 8, 15, 30])
@pytest.mark.parametrize("x", [0.01, 0.5, 3.0, 8.7, 20.0, 55.0])
def test_against_quadrature(x, df):
    assert chi_square_sf(x, df) == pytest.approx(quad_sf(x, df), abs=1e-10, rel=1e-10)


@given(st.floats(0, 200))
def test_two_degrees_of_freedom_is_exponential(x):
    assert abs(chi_square_sf(x, 2) - math.exp(-x / 2)) <= 1e-12


@given(st.integers(1, 40), st.floats(0, 150), st.floats(0, 150))
def test_monotone_in_x(df, a, b):
    lo, hi = sorted((a, b))
    assert chi_square_sf(lo, df) >= chi_square_sf(hi, df)


def test_gamma_q_half_integer_closed_form():
    # Q(1/2, x) = erfc(sqrt(x))
    for x in (0.1, 1.0, 4.0, 30.0):
        assert regularized_gamma_q(0.5, x) == pytest.approx(math.erfc(math.sqrt(x)), rel=1e-12)


@pytest.mark.parametrize("x", [float("nan"), float("inf"), -1.0])
def test_rejects_bad_x(x):
    with pytest.raises(ValueError):
        chi_square_sf(x, 3)


@pytest.mark.parametrize("df", [0, -1, 2.5])
def test_rejects_bad_df(df):
    with pytest.raises(ValueError):
        chi_square_sf(1.0, df)


def test_vectorised_form():
    xs = np.array([[0.0, 1.0], [2.0, 8.7]])
    out = chi_square_sf_many(xs, 8)
    assert out.shape == (2, 2)
    assert out[1, 1] == chi_square_sf(8.7, 8)
