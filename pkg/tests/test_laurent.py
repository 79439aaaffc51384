import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windline.errors import AnnulusViolation
from windline.grt import sinc_sinh_function
from windline.laurent import (
    AnalyticFunction,
    Singularity,
    SingularityKind,
    classify,
    default_radius,
    evaluate_series,
    laurent_coeffs,
    resolve,
    residue,
)


def test_rational_function_coefficients():
    f = AnalyticFunction(lambda z: 2 / z ** 3 - 1j / z + 4 + z ** 2)
    c = laurent_coeffs(f, 0, radius=0.5)
    assert set(c) >= {-3, -1, 0, 2}
    assert c[-3] == pytest.approx(2, abs=1e-12)
    assert c[-1] == pytest.approx(-1j, abs=1e-12)
    assert c[0] == pytest.approx(4, abs=1e-12)
    assert c[2] == pytest.approx(1, abs=1e-12)
    assert all(v == 0 for k, v in c.items() if k not in (-3, -1, 0, 2))


def test_essential_tail_is_reciprocal_factorial():
    c = laurent_coeffs(lambda z: np.exp(1 / z), 0, radius=1.0)
    for n in range(1, 12):
        assert c[-n] == pytest.approx(1 / math.factorial(n), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize(
    "func, kind, order, res",
    [
        (lambda z: np.sin(z) / z, SingularityKind.REMOVABLE, 0, 0),
        (lambda z: 1 / z, SingularityKind.POLE, 1, 1),
        (lambda z: 1 / z ** 3, SingularityKind.POLE, 3, 0),
        (lambda z: np.exp(z) / z ** 2, SingularityKind.POLE, 2, 1),
        (lambda z: 1 / np.sin(z), SingularityKind.POLE, 1, 1),
        (lambda z: np.exp(1 / z), SingularityKind.ESSENTIAL, None, 1),
        (lambda z: np.sin(1 / z), SingularityKind.ESSENTIAL, None, 1),
    ],
)
def test_classification(func, kind, order, res):
    s = classify(func, 0, radius=0.5)
    assert s.kind is kind
    if order is not None:
        assert s.order == order
    assert s.residue == pytest.approx(res, abs=1e-10)


def test_wedge_function_residue_at_origin():
    f = sinc_sinh_function(r=20)
    assert residue(f, 0, scale=20) == pytest.approx(-1, abs=1e-10)


def test_declared_residues_of_cosh_zeros_match_numerics():
    f = sinc_sinh_function(r=20)
    for s in f.singularities[1:5]:
        assert residue(f, s.location, scale=20) == pytest.approx(s.residue, rel=1e-9)


def test_annulus_must_avoid_other_singularities():
    f = AnalyticFunction(lambda z: 1 / (z * (z - 1)), [0, 1])
    assert default_radius(f, 0) == pytest.approx(0.5)
    with pytest.raises(AnnulusViolation):
        laurent_coeffs(f, 0, radius=1.5)


def test_resolve_keeps_declarations():
    f = AnalyticFunction(lambda z: 1 / z ** 2, [Singularity.declared(0, order=2)])
    s = resolve(f, f.singularities[0])
    assert s.order == 2
    assert s.residue == pytest.approx(0, abs=1e-12)
    assert list(s.principal_indices) == [2]


@given(st.floats(0.05, 0.9), st.floats(0.05, 0.9))
@settings(max_examples=25, deadline=None)
def test_coefficients_do_not_depend_on_radius(r1, r2):
    # nearest other singularity at 1
    f = lambda z: np.exp(z) / (z ** 2 * (z - 1))  # noqa: E731
    a = laurent_coeffs(f, 0, radius=r1, index_range=(-4, 4))
    b = laurent_coeffs(f, 0, radius=r2, index_range=(-4, 4))
    for k in range(-4, 5):
        assert a[k] == pytest.approx(b[k], rel=1e-8, abs=1e-10)


def test_coefficients_against_mpmath_taylor():
    # e^z/(z-1) near 0 is analytic; compare with high-precision Taylor coefficients
    with mpmath.workdps(30):
        ref = mpmath.taylor(lambda z: mpmath.exp(z) / (z - 1), 0, 8)
    c = laurent_coeffs(lambda z: np.exp(z) / (z - 1), 0, radius=0.5, index_range=(-2, 8))
    for k in range(9):
        assert c[k] == pytest.approx(complex(ref[k]), rel=1e-10)


@given(st.floats(0.1, 0.45), st.floats(0, 2 * math.pi))
@settings(max_examples=25, deadline=None)
def test_series_reconstructs_function_in_annulus(rho, theta):
    f = lambda z: 1 / z ** 2 + np.cos(z) / z + 1 / (z - 2)  # noqa: E731
    c = laurent_coeffs(f, 0, radius=1.0, index_range=(-4, 40))
    w = rho * np.exp(1j * theta)
    assert evaluate_series(c, w) == pytest.approx(f(w), rel=1e-9)
