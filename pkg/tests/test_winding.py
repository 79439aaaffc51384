import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shapes import StarCycle
from windline.curves import arc, circle, from_expression, line, model_sector, polygon, semicircle, zeppelin
from windline.errors import PointOnCurve
from windline.geometry import ClosedCurve, Cycle
from windline.winding import (
    crossing_count,
    winding_bounded,
    winding_classical,
    winding_geometric,
    winding_off_curve,
    winding_pv,
)

ON_CURVE = (winding_pv, winding_bounded, winding_geometric)


def _inside_polygon(vertices, p):
    from matplotlib.path import Path

    return Path(np.array([[v.real, v.imag] for v in vertices])).contains_point((p.real, p.imag))


def test_zeppelin_windings():
    z = Cycle.of(zeppelin())
    for method in ON_CURVE:
        assert method(z, 0).value == pytest.approx(1.5, abs=1e-6)
    assert winding_off_curve(z, -0.1) == 2
    assert winding_off_curve(z, 0.1) == 1


def test_zeppelin_guard_limit():
    rep = winding_bounded(Cycle.of(zeppelin()), 0)
    limits = [g["limit"] for g in rep.diagnostics["guard_values"]]
    assert limits and all(lim == pytest.approx(0.75, abs=1e-4) for lim in limits)


def test_smooth_point_of_circle_is_half():
    for method in ON_CURVE:
        assert method(circle(), cmath.exp(0.7j)).value == pytest.approx(0.5, abs=1e-7)


def test_classical_refuses_points_on_the_trace():
    with pytest.raises(PointOnCurve):
        winding_off_curve(circle(), 1.0)
    with pytest.raises(PointOnCurve):
        winding_classical(circle(), 1j)


def test_polygon_against_matplotlib_point_in_polygon(rng):
    verts = [0, 3, 3 + 2j, 1.5 + 0.5j, 2j]
    poly = polygon(verts)
    for p in rng.uniform(-0.5, 3.5, (40, 2)):
        z = complex(*p)
        expected = 1 if _inside_polygon(verts, z) else 0
        assert winding_off_curve(poly, z) == expected


def test_crossing_count_matches_integral_on_winding_twice():
    c = from_expression("exp(2*i*t)*(1+0.3*cos(t))", (0, 2 * math.pi))
    assert crossing_count(Cycle.of(c), 0.1) == 2
    assert winding_off_curve(c, 0.1) == 2


@pytest.mark.parametrize("seed", range(6))
def test_methods_agree_with_construction_at_corners_and_smooth_points(seed):
    s = StarCycle(np.random.default_rng(seed))
    for v, interior in s.corners:
        for method in ON_CURVE:
            assert method(s.curve, v).value == pytest.approx(interior / (2 * math.pi), abs=1e-7)
    for p in s.smooth:
        for method in ON_CURVE:
            assert method(s.curve, p).value == pytest.approx(0.5, abs=1e-7)


def _similarity_case(seed):
    rng = np.random.default_rng(seed)
    s = StarCycle(rng)
    a = complex(*rng.uniform(-2, 2, 2))
    if abs(a) < 0.2:
        a = 1.0
    b = complex(*rng.uniform(-5, 5, 2))
    return s, a, b


@pytest.mark.parametrize("seed", range(4))
def test_affine_invariance(seed):
    s, a, b = _similarity_case(seed)
    moved = s.curve.mapped(a, b)
    v = s.corners[0][0]
    for method in ON_CURVE:
        assert method(moved, a * v + b).value == pytest.approx(method(s.curve, v).value, abs=1e-7)
    assert winding_off_curve(moved, b) == winding_off_curve(s.curve, 0) == 1


@pytest.mark.parametrize("seed", range(4))
def test_reversal_negates(seed):
    s = StarCycle(np.random.default_rng(100 + seed))
    rev = s.curve.reversed()
    for p in (s.corners[1][0], s.smooth[0]):
        for method in ON_CURVE:
            assert method(rev, p).value == pytest.approx(-method(s.curve, p).value, abs=1e-7)
    assert winding_off_curve(rev, 0) == -1


def test_cycle_additivity():
    sec = model_sector(1.0, math.pi / 3)
    half = semicircle(2.0)
    both = Cycle([(2, sec), (-1, half)])
    for method in ON_CURVE:
        total = method(both, 0).value
        parts = 2 * method(sec, 0).value - method(half, 0).value
        assert total == pytest.approx(parts, abs=1e-7)
        assert total == pytest.approx(2 / 6 - 0.5, abs=1e-7)


def test_multiplicity_scales_off_curve():
    assert winding_off_curve(Cycle([(3, circle())]), 0.2) == 3


@given(st.floats(0.05, 0.95), st.floats(0.5, 3.0))
@settings(max_examples=20, deadline=None)
def test_half_integer_law_on_smooth_boundary(frac, radius):
    # smooth points of a circle and of the straight diameter both give 1/2
    assert winding_bounded(circle(0, radius), radius * cmath.exp(2j * math.pi * frac)).value == pytest.approx(
        0.5, abs=1e-7)
    x = radius * (2 * frac - 1)
    assert winding_pv(semicircle(radius), x).value == pytest.approx(0.5, abs=1e-7)


def test_bounded_integrand_stays_bounded_near_a_hit():
    from windline.winding import _real_integrand

    seg = zeppelin().segments[0]
    h = _real_integrand(seg, 0)
    t = math.pi + np.concatenate([-np.logspace(-1, -7, 40), np.logspace(-7, -1, 40)])
    vals = h(t)
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(vals)) < 2.0
    # approaches the curvature limit; closer in, rounding takes over (hence the guard)
    near = h(math.pi + np.array([-1e-5, 1e-5]))
    assert near == pytest.approx([0.75, 0.75], abs=1e-4)


def test_geometric_detour_integer_part():
    rep = winding_geometric(Cycle.of(zeppelin()), 0)
    assert rep.integer_part_tilde == 1
    assert rep.angle_sum == pytest.approx(0.5, abs=1e-12)


def test_pole_moving_through_the_curve():
    c = circle()
    values = [winding_off_curve(c, 0.9), winding_bounded(c, 1.0).value, winding_off_curve(c, 1.1)]
    assert values == pytest.approx([1, 0.5, 0], abs=1e-7)


def test_piecewise_curve_with_arc_corners():
    # quarter disc: corners of angle pi/2 at 0 and pi/2 at 1 and i
    c = ClosedCurve([line(0, 1), arc(0, 1, 0, math.pi / 2), line(1j, 0)])
    for p in (0, 1, 1j):
        for method in ON_CURVE:
            assert method(c, p).value == pytest.approx(0.25, abs=1e-7)
