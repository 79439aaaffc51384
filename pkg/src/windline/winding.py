"""Winding numbers of cycles about points on or off the trace.

Three independent routes for points on the trace: the principal value of
``dz/(z - z0)``, the bounded real integrand ``(x y' - y x')/(x^2 + y^2)``,
and the corner-angle decomposition over a detoured cycle.  Off the trace
the classical integer winding is cross-checked with a ray-crossing count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .curves import arc
from .errors import DetourOverlap, NoConvergence, NotC11NearHit, OracleMismatch, PointOnCurve
from .geometry import ClosedCurve, Cycle, as_cycle, find_hits, signed_curvature
from .integrate import (
    CurveParameter,
    QuadratureConfig,
    exclusion_windows,
    line_integral,
    pv_integral,
)
from .laurent import AnalyticFunction, Singularity
from .quadrature import gauss_legendre, integrate

INTEGER_RESIDUAL = 1e-6
GUARD_FRACTION = 1e-4
LIMIT_RADIUS = 1e-6
DELTA_START = 1e-3
DELTA_MIN = 1e-8
MAX_POLYLINE_POINTS = 1 << 18


class WindingMethod(str, Enum):
    PV = "PV"
    BOUNDED = "BoundedReal"
    GEOMETRIC = "Geometric"
    CLASSICAL = "ClassicalInteger"


@dataclass
class WindingReport:
    value: float
    method: WindingMethod
    hits: list = field(default_factory=list)
    integer_part_tilde: int | None = None
    angle_sum: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _kernel(z0):
    z0 = complex(z0)
    return AnalyticFunction(lambda z: 1.0 / (z - z0), [Singularity.pole(z0, 1, residue=1.0)],
                            label=f"1/(z-{z0})")


# -- off the trace -----------------------------------------------------------

def _polyline(seg, z0):
    """Parameter samples dense enough that chords never swing around ``z0``."""
    t = np.linspace(seg.t0, seg.t1, 65)
    while True:
        z = seg.point(t)
        tm = 0.5 * (t[:-1] + t[1:])
        zm = seg.point(tm)
        dist = np.minimum(np.minimum(np.abs(z[:-1] - z0), np.abs(z[1:] - z0)), np.abs(zm - z0))
        chord = np.abs(z[1:] - z[:-1])
        sag = np.abs(zm - 0.5 * (z[:-1] + z[1:]))
        bad = (chord > 0.5 * dist) | (sag > 0.25 * dist)
        if not np.any(bad):
            return z, True
        if t.size + np.count_nonzero(bad) > MAX_POLYLINE_POINTS:
            return z, False
        t = np.sort(np.concatenate([t, tm[bad]]))


def crossing_count(cycle, z0):
    """Signed ray-crossing count with multiplicities, or ``None`` if sampling could not resolve it."""
    cycle = as_cycle(cycle)
    z0 = complex(z0)
    total = 0
    for m, curve in cycle.terms:
        pts = []
        for seg in curve.segments:
            z, ok = _polyline(seg, z0)
            if not ok:
                return None
            pts.append(z[:-1])
        ring = np.concatenate(pts + [pts[0][:1]])
        total += m * _kernels.polyline_winding(ring.real, ring.imag, z0.real, z0.imag)
    return int(total)


def _classical(cycle, z0, cfg):
    val = line_integral(_kernel(z0), cycle, cfg, check_path=False) / (2j * math.pi)
    n = round(val.real)
    resid = abs(val - n)
    if resid >= INTEGER_RESIDUAL:
        raise NoConvergence(f"winding integral {val} is not within {INTEGER_RESIDUAL} of an integer")
    crossings = crossing_count(cycle, z0)
    if crossings is not None and crossings != n:
        raise OracleMismatch(f"contour integral gives {n} but ray crossings give {crossings} about {z0}")
    return int(n), val, crossings


def winding_off_curve(cycle, z0, cfg=None):
    """Integer winding number about a point not on the trace."""
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    if find_hits(cycle, z0):
        raise PointOnCurve(f"{z0} lies on the cycle; use an on-curve method")
    return _classical(cycle, z0, cfg)[0]


def winding_classical(cycle, z0, cfg=None):
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    if find_hits(cycle, z0):
        raise PointOnCurve(f"{z0} lies on the cycle; use an on-curve method")
    n, raw, crossings = _classical(cycle, z0, cfg)
    return WindingReport(float(n), WindingMethod.CLASSICAL, [], diagnostics={
        "integral_value": raw, "residual": abs(raw - n), "crossings": crossings})


# -- principal value ---------------------------------------------------------

def winding_pv(cycle, z0, cfg=None):
    """Principal value of ``(1/2 pi i) * integral of dz/(z - z0)``."""
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    hits = find_hits(cycle, z0)
    f = _kernel(z0)
    res = pv_integral(f, cycle, [(f.singularities[0], hits)], cfg)
    if not res.converged:
        raise NoConvergence(f"principal value about {z0} did not converge ({res.status.value})")
    w = res.value / (2j * math.pi)
    return WindingReport(w.real, WindingMethod.PV, hits, diagnostics={
        "imag_part": w.imag, "eps_trace": res.eps_trace})


# -- bounded real integrand --------------------------------------------------

def _real_integrand(seg, z0):
    def h(t):
        w = seg.point(t) - z0
        v = seg.velocity(t)
        return _kernels.bounded_integrand(w.real, w.imag, v.real, v.imag)

    return h


def _guarded(seg, z0, limit_at, cutoff):
    """Integrand with values near the hit replaced by the one-sided limit."""
    base = _real_integrand(seg, z0)

    def h(t):
        t = np.asarray(t, dtype=float)
        out = base(t)
        close = np.abs(seg.point(t) - z0) < cutoff
        if np.any(close):
            out = np.where(close, limit_at, out)
        return out

    return h


def _limit_value(seg, t):
    """Limit of the bounded integrand at a hit, ``k * |velocity| / 2``."""
    k = signed_curvature(seg, t)
    speed = abs(complex(seg.velocity(t)))
    val = 0.5 * k * speed
    if not math.isfinite(val):
        raise NotC11NearHit(f"no finite curvature limit at t={t}")
    return val


def winding_bounded(cycle, z0, cfg=None):
    """Ordinary integral of the bounded real integrand, divided by 2 pi."""
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    z0 = complex(z0)
    hits = find_hits(cycle, z0)
    cutoff = LIMIT_RADIUS * cycle.scale
    total = 0.0
    guards = []
    for ci, (m, curve) in enumerate(cycle.terms):
        # per segment: list of (t_hit, side) where side +1 means the guard extends right
        marks = {k: [] for k in range(len(curve.segments))}
        for h in hits:
            if h.curve_index != ci:
                continue
            marks[h.segment_index].append((h.t_star, +1))
            kin, tin = h.incoming
            if h.at_breakpoint:
                marks[kin].append((tin, -1))
            else:
                marks[h.segment_index].append((h.t_star, -1))
        for k, seg in enumerate(curve.segments):
            rho = GUARD_FRACTION * seg.length
            cuts = [seg.t0, seg.t1]
            windows = []
            for t_hit, side in marks[k]:
                lo, hi = (t_hit, min(t_hit + rho, seg.t1)) if side > 0 else (max(t_hit - rho, seg.t0), t_hit)
                lim = _limit_value(seg, t_hit)
                guards.append({"curve": ci, "segment": k, "t": t_hit, "side": side, "limit": lim})
                windows.append((lo, hi, lim))
                cuts += [lo, hi]
            cuts = sorted(set(cuts))
            seg_total = 0.0
            for a, b in zip(cuts[:-1], cuts[1:]):
                if b <= a:
                    continue
                inside = next((w for w in windows if w[0] <= a and b <= w[1]), None)
                if inside is not None:
                    val = gauss_legendre(_guarded(seg, z0, inside[2], cutoff), a, b, 16)
                else:
                    h = _real_integrand(seg, z0)
                    val, _ = integrate(h, a, b, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
                    val = val.real
                if not math.isfinite(val):
                    raise NotC11NearHit(f"integrand unbounded on segment {k} of curve {ci}")
                seg_total += float(np.real(val))
            total += m * seg_total
    value = total / (2 * math.pi)
    return WindingReport(value, WindingMethod.BOUNDED, hits, diagnostics={"guard_values": guards})


# -- geometric decomposition -------------------------------------------------

def _detoured(curve, hits, z0, delta):
    param = CurveParameter(curve)
    wins = sorted((exclusion_windows(curve, h, delta, param) for h in hits), key=lambda w: w.tau_hit)
    segments = []
    for i, w in enumerate(wins):
        nxt = wins[(i + 1) % len(wins)]
        b = nxt.entry + (param.total if i == len(wins) - 1 else 0.0)
        if b <= w.exit:
            raise DetourOverlap(f"detour discs of radius {delta:.3e} overlap along the curve")
        for k, ta, tb in param.pieces(w.exit, b):
            segments.append(curve.segments[k].restricted(ta, tb))
        th_in = cmath.phase(param.point(nxt.entry) - z0)
        th_out = cmath.phase(param.point(nxt.exit) - z0)
        sweep = (th_in - th_out) % (2 * math.pi)
        if sweep <= 0:
            raise DetourOverlap("degenerate detour arc (tangential hit)")
        segments.append(arc(z0, delta, th_in, th_in - sweep, "detour"))
    return ClosedCurve(segments, join_tol=1e-7)


def winding_geometric(cycle, z0, delta=None, cfg=None):
    """Integer winding of the clockwise-detoured cycle plus the corner angles over 2 pi."""
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    z0 = complex(z0)
    hits = find_hits(cycle, z0)
    if not hits:
        n = winding_off_curve(cycle, z0, cfg)
        return WindingReport(float(n), WindingMethod.GEOMETRIC, [], n, 0.0, {"delta": None})
    scale = cycle.scale
    delta = DELTA_START * scale if delta is None else float(delta)
    while True:
        try:
            terms = []
            for ci, (m, curve) in enumerate(cycle.terms):
                own = [h for h in hits if h.curve_index == ci]
                terms.append((m, _detoured(curve, own, z0, delta) if own else curve))
            break
        except DetourOverlap:
            delta *= 0.5
            if delta < DELTA_MIN * scale:
                raise
    n_tilde = sum(m * winding_off_curve(Cycle([(1, c)]), z0, cfg) for m, c in terms)
    mult = {ci: m for ci, (m, _) in enumerate(cycle.terms)}
    angle_sum = sum(mult[h.curve_index] * h.alpha for h in hits) / (2 * math.pi)
    degenerate = [h for h in hits if h.degenerate]
    return WindingReport(n_tilde + angle_sum, WindingMethod.GEOMETRIC, hits, int(n_tilde), angle_sum,
                         {"delta": delta, "degenerate_hits": len(degenerate)})


METHODS = {
    WindingMethod.PV: winding_pv,
    WindingMethod.BOUNDED: winding_bounded,
    WindingMethod.GEOMETRIC: winding_geometric,
}
