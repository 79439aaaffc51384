import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from windline.errors import NoConvergence, NonFiniteIntegrand
from windline.quadrature import gauss_legendre, integrate


@pytest.mark.parametrize(
    "func, a, b",
    [
        (np.exp, 0.0, 1.0),
        (lambda t: np.sqrt(t), 0.0, 2.0),
        (lambda t: np.cos(40 * t), 0.0, 3.0),
        (lambda t: 1.0 / (1e-3 + t ** 2), -1.0, 1.0),
        (lambda t: np.log(t), 0.0, 1.0),
    ],
)
def test_matches_scipy_quad(func, a, b):
    ref, _ = sp_integrate.quad(func, a, b, epsabs=1e-13, epsrel=1e-13, limit=500)
    val, err = integrate(func, a, b)
    assert val.real == pytest.approx(ref, rel=1e-10, abs=1e-11)
    assert err < 1e-8


def test_complex_integrand():
    val, _ = integrate(lambda t: np.exp(1j * t), 0.0, 2 * math.pi)
    assert abs(val) < 1e-13


def test_reversed_interval_negates():
    a, _ = integrate(np.sin, 0.0, 2.0)
    b, _ = integrate(np.sin, 2.0, 0.0)
    assert a == pytest.approx(-b, abs=1e-15)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFiniteIntegrand):
        with np.errstate(divide="ignore"):
            integrate(lambda t: 1.0 / t, -1.0, 1.0)


def test_budget_exhaustion_raises():
    with pytest.raises(NoConvergence):
        integrate(lambda t: np.sin(1.0 / (t + 1e-4)), 0.0, 1.0, max_intervals=5)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=32))
@settings(max_examples=50, deadline=None)
def test_gauss_legendre_16_exact_for_degree_31(coeffs):
    p = np.polynomial.Polynomial(coeffs)
    exact = p.integ()(1.5) - p.integ()(-0.5)
    assert gauss_legendre(p, -0.5, 1.5, 16) == pytest.approx(exact, rel=1e-12, abs=1e-11)
