import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shapes import StarCycle
from windline.curves import circle, model_sector, polygon, semicircle, sinc_sinh_contour
from windline.errors import IrrationalAngle, NotNullHomologous
from windline.grt import (
    Verdict,
    admissible_indices,
    check_condition_B,
    classical_rhs,
    evaluate,
    improper_integral_demo,
    rational_angle,
    sinc_sinh_function,
    sinc_sinh_report,
)
from windline.integrate import PVStatus, pv_integral
from windline.laurent import AnalyticFunction, Singularity


def simple_poles(poles):
    return AnalyticFunction(lambda z: sum(r / (z - p) for p, r in poles),
                            [Singularity.pole(p, 1, residue=r) for p, r in poles])


def random_configuration(rng):
    """Star cycle with 1-3 simple poles and the winding-weighted residue sum from construction."""
    s = StarCycle(rng)
    poles, expected = [], 0j
    for _ in range(int(rng.integers(1, 4))):
        kind = int(rng.integers(0, 4))
        res = complex(*rng.normal(size=2))
        if kind == 0:
            p, w = 0.1 * complex(*rng.uniform(-0.7, 0.7, 2)), 1.0
        elif kind == 1:
            p, w = complex(3 + rng.uniform(), rng.uniform()), 0.0
        elif kind == 2:
            p, w = s.smooth[int(rng.integers(len(s.smooth)))], 0.5
        else:
            p, a = s.corners[int(rng.integers(len(s.corners)))]
            w = a / (2 * math.pi)
        if any(abs(p - q) < 1e-3 for q, _ in poles):
            continue
        poles.append((p, res))
        expected += w * res
    return s, poles, expected


def test_randomized_simple_pole_configurations():
    rng = np.random.default_rng(4)
    for _ in range(50):
        s, poles, expected = random_configuration(rng)
        rep = evaluate(simple_poles(poles), s.curve)
        assert rep.verdict is Verdict.VERIFIED
        assert abs(rep.lhs.value - rep.rhs) < 1e-6
        assert rep.rhs == pytest.approx(expected, abs=1e-6)


def test_second_order_pole_on_an_arc_is_not_verified():
    rng = np.random.default_rng(11)
    for _ in range(10):
        s = StarCycle(rng, arc_prob=1.0)
        p = s.smooth[0]
        f = AnalyticFunction(lambda z, p=p: 1 / (z - p) ** 2 + 0.5 / (z - p), [Singularity.pole(p, 2)])
        rep = evaluate(f, s.curve)
        assert rep.verdict is Verdict.CONDITIONS_FAILED
        assert not rep.per_singularity[0].cond_a.ok


@pytest.mark.parametrize("pq", [(1, 1), (1, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("n", range(2, 8))
def test_condition_b_violations_diverge_with_predicted_exponent(pq, n):
    p, q = pq
    alpha = p / q * math.pi
    f = AnalyticFunction(lambda z: 1 / z ** n, [Singularity.pole(0, n)])
    res = pv_integral(f, model_sector(1.0, alpha))
    if ((n - 1) * p) % (2 * q) == 0:
        assert res.status is PVStatus.CONVERGED
        assert abs(res.value) < 1e-6
    else:
        assert res.status is PVStatus.DIVERGED
        assert res.growth_exponent == pytest.approx(n - 1, abs=0.2)


def test_condition_b_examples():
    half_disc_odd = Singularity.pole(0, 3, laurent={-3: 1, -1: 1})
    assert check_condition_B(math.pi, half_disc_odd).ok
    assert not check_condition_B(math.pi, Singularity.pole(0, 2, laurent={-2: 1})).ok
    assert check_condition_B(math.pi / 2, Singularity.pole(0, 5, laurent={-5: 1})).ok
    assert admissible_indices(1, 2, 12) == (1, 5, 9)


def test_irrational_angle_fails_condition_b_conservatively():
    with pytest.raises(IrrationalAngle):
        rational_angle(1.0)
    res = check_condition_B(1.0, Singularity.pole(0, 3, laurent={-3: 1}))
    assert not res.ok and res.p is None


@given(st.integers(1, 12), st.integers(1, 12))
@settings(max_examples=40, deadline=None)
def test_rational_angle_recovers_lowest_terms(p, q):
    if p > 2 * q:
        return
    g = math.gcd(p, q)
    assert rational_angle(p / q * math.pi) == (p // g, q // g)


def test_off_curve_only_matches_classical_residue_sum():
    f = simple_poles([(0.2, 1.5), (-0.3 + 0.1j, -2j), (4, 1)])
    c = polygon([-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j])
    rep = evaluate(f, c)
    assert rep.verdict is Verdict.VERIFIED
    assert rep.rhs == pytest.approx(classical_rhs(f, c), abs=1e-7)
    assert rep.rhs == pytest.approx(1.5 - 2j, abs=1e-9)


def test_rhs_ratio_as_pole_crosses_the_curve():
    rhs = [evaluate(simple_poles([(x, 1.0)]), circle()).rhs for x in (0.9, 1.0, 1.1)]
    assert np.array(rhs) == pytest.approx([1, 0.5, 0], abs=1e-6)


def test_half_disc_simple_and_third_order_poles():
    c = semicircle()
    rep = evaluate(simple_poles([(0.3, 1.0)]), c)
    assert rep.verdict is Verdict.VERIFIED
    assert rep.per_singularity[0].winding == pytest.approx(0.5, abs=1e-7)
    cubic = AnalyticFunction(lambda z: 1 / (z - 0.3) ** 3, [Singularity.pole(0.3, 3)])
    rep = evaluate(cubic, c)
    assert rep.verdict is Verdict.VERIFIED
    assert rep.discrepancy < 1e-5


def test_half_disc_second_order_pole_fails():
    f = AnalyticFunction(lambda z: 1 / z ** 2, [Singularity.pole(0, 2)])
    rep = evaluate(f, semicircle())
    assert rep.verdict in (Verdict.CONDITIONS_FAILED, Verdict.LHS_DIVERGED)
    assert rep.lhs.status is PVStatus.DIVERGED


def test_essential_singularity_off_curve_uses_relaxed_tolerance():
    f = AnalyticFunction(lambda z: np.exp(1 / z), [Singularity.declared(0)])
    rep = evaluate(f, circle())
    assert rep.verdict is Verdict.VERIFIED
    assert rep.rhs == pytest.approx(1.0, abs=1e-8)
    assert rep.diagnostics["relaxed_for_essential"]


def test_exterior_probe_detects_non_null_homologous_cycle():
    f = simple_poles([(0, 1.0)])
    evaluate(f, circle(), exterior_probes=[5.0])
    with pytest.raises(NotNullHomologous):
        evaluate(f, circle(), exterior_probes=[0.5])


def test_wedge_contour_residue_theorem():
    rep = sinc_sinh_report(20)
    assert rep.verdict is Verdict.VERIFIED
    assert rep.lhs.value == pytest.approx(-0.25, abs=1e-7)
    assert (rep.lhs.value * 2j * math.pi).imag == pytest.approx(-math.pi / 2, abs=1e-8)


def test_wedge_contour_encloses_no_cosh_zero():
    f = sinc_sinh_function(r=20)
    from windline.winding import winding_off_curve

    for s in f.singularities[1:]:
        assert winding_off_curve(sinc_sinh_contour(20), s.location) == 0


@pytest.mark.parametrize("r", [5.0, 10.0, 20.0, 40.0])
def test_improper_integral_identity(r):
    res = improper_integral_demo(r)
    assert res.identity_residual < 1e-8
    assert res.symmetry_residual < 1e-8
    assert abs(res.estimate - math.pi / 4) <= res.error_bound


def test_arc_bound_shrinks_with_radius():
    bounds = [improper_integral_demo(r).error_bound for r in (5.0, 10.0, 20.0, 40.0)]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
