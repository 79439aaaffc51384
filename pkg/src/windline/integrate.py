"""Line integrals over cycles and principal values with singular points on the trace.

The principal value cuts the discs ``|z - s| <= eps`` out of the cycle (in
the image, not in the parameter) and follows the remainder as ``eps``
shrinks geometrically.

For a singular point with a principal part beyond the simple pole the
integrand is split as ``f = P + g``: ``P`` holds the terms ``a_{-k}/(z-s)^k``
with ``k >= 2`` and is integrated exactly from its antiderivative, while
``g`` (simple pole plus regular part) goes through adaptive quadrature.  The
exact part is what can blow up; each of its terms is compared with its own
rounding-error bound so that terms which cancel exactly read as zero rather
than as amplified round-off.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from ._parallel import ordered_map
from .errors import OverlappingExclusions, SingularityOnPath, WindowEscape
from .geometry import Hit, as_cycle, find_hits
from .laurent import (
    N_CLS,
    ZERO_TOL,
    SingularityKind,
    as_function,
    circle_coefficients,
    default_radius,
    evaluate_series,
    resolve,
)
from .quadrature import integrate

TAYLOR_TERMS = 40
RESOLVE_FACTOR = 1000.0
DIVERGENCE_SLOPE = 0.5
# smallest exclusion radius (relative to the curve scale) whose window
# endpoints are still resolved against parameter rounding
EPS_FLOOR = 1e-7
_U = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    max_subdivisions: int = 4000
    eps0: float = 1e-2
    eps_ratio: float = 0.5
    eps_steps: int = 14

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if not 0 < self.eps_ratio < 1:
            raise ValueError("eps_ratio must lie in (0, 1)")
        if self.eps_steps < 4:
            raise ValueError("eps_steps must be at least 4")
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if self.eps0 * self.eps_ratio ** (self.eps_steps - 1) < EPS_FLOOR:
            raise ValueError(f"eps schedule ends below {EPS_FLOOR:g} of the curve scale")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def eps_schedule(self, scale=1.0):
        return self.eps0 * scale * self.eps_ratio ** np.arange(self.eps_steps)

    def replace(self, **overrides):
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})


class PVStatus(str, Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class PVResult:
    status: PVStatus
    value: complex | None
    growth_exponent: float | None
    eps_trace: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status is PVStatus.CONVERGED


# -- plain line integrals ----------------------------------------------------

def _segment_integral(f, seg, a, b, cfg):
    def integrand(t):
        return f(seg.point(t)) * seg.velocity(t)

    val, _ = integrate(integrand, a, b, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
    return val


def line_integral(f, cycle, cfg=None, check_path=True):
    """``sum m_l * integral over gamma_l of f(z) dz`` by adaptive Gauss-Kronrod per segment."""
    f = as_function(f)
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    if check_path:
        for s in f.singularities:
            if find_hits(cycle, s.location):
                raise SingularityOnPath(f"declared singularity {s.location} lies on the cycle")
    tasks = [(m, seg) for m, curve in cycle.terms for seg in curve.segments]
    vals = ordered_map(lambda task: task[0] * _segment_integral(f, task[1], task[1].t0, task[1].t1, cfg), tasks)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


# -- parameter bookkeeping ---------------------------------------------------

class CurveParameter:
    """Global parameter running through a closed curve's segments, wrapping modulo ``total``."""

    def __init__(self, curve):
        self.curve = curve
        self.lengths = np.array([s.length for s in curve.segments])
        self.offsets = np.concatenate([[0.0], np.cumsum(self.lengths)[:-1]])
        self.total = float(np.sum(self.lengths))

    def to_global(self, k, t):
        return float(self.offsets[k] + (t - self.curve.segments[k].t0))

    def split(self, tau):
        u = tau % self.total
        k = int(np.searchsorted(self.offsets, u, side="right")) - 1
        k = min(max(k, 0), len(self.lengths) - 1)
        seg = self.curve.segments[k]
        return k, min(max(seg.t0 + (u - self.offsets[k]), seg.t0), seg.t1)

    def point(self, tau):
        k, t = self.split(tau)
        return complex(self.curve.segments[k].point(t))

    def pieces(self, a, b):
        """Split the global interval ``[a, b]`` into ``(segment, t_start, t_end)`` pieces."""
        out = []
        if b <= a:
            return out
        base = math.floor(a / self.total) * self.total
        lo, hi = a - base, b - base
        k = min(int(np.searchsorted(self.offsets, lo, side="right")) - 1, len(self.lengths) - 1)
        shift = 0.0
        tiny = 1e-15 * self.total
        while lo < hi - tiny:
            start = shift + self.offsets[k]
            end = min(start + self.lengths[k], hi)
            if end - lo > tiny:
                seg = self.curve.segments[k]
                ta = min(max(seg.t0 + (lo - start), seg.t0), seg.t1)
                tb = min(max(seg.t0 + (end - start), seg.t0), seg.t1)
                if tb > ta:
                    out.append((k, ta, tb))
            lo = end
            k += 1
            if k == len(self.lengths):
                k = 0
                shift += self.total
        return out


@dataclass(frozen=True)
class Window:
    """Parameter interval around a hit where the curve stays inside the eps-disc."""

    hit: Hit
    eps: float
    tau_hit: float
    entry: float
    exit: float
    pieces: tuple

    @property
    def half_widths(self):
        return self.tau_hit - self.entry, self.exit - self.tau_hit


def _boundary(param, tau_h, z0, eps, direction, speed):
    def gap(tau):
        return abs(param.point(tau) - z0) - eps

    h = 0.5 * eps / speed
    lo = tau_h
    while True:
        hi = tau_h + direction * h
        if gap(hi) >= 0:
            break
        lo = hi
        h *= 2
        if h > 0.5 * param.total:
            raise WindowEscape(f"exclusion disc of radius {eps:.3e} swallows the curve around {z0}")
    a, b = (lo, hi) if lo < hi else (hi, lo)
    return brentq(gap, a, b, xtol=1e-15 * max(1.0, abs(tau_h)), rtol=1e-15, maxiter=200)


def exclusion_windows(curve, hit, eps, param=None):
    """Maximal parameter window around ``hit`` with ``|curve - hit.point| <= eps``.

    ``Window.pieces`` lists the window as ``(segment, t_start, t_end)``
    intervals; it spans several segments when the hit is at a corner.
    """
    param = param or CurveParameter(curve)
    segs = curve.segments
    tau_h = param.to_global(hit.segment_index, hit.t_star)
    v_out = abs(complex(segs[hit.segment_index].velocity(hit.t_star)))
    kin, tin = hit.incoming
    v_in = abs(complex(segs[kin].velocity(tin)))
    exit_ = _boundary(param, tau_h, hit.point, eps, +1, v_out)
    entry = _boundary(param, tau_h, hit.point, eps, -1, v_in)
    return Window(hit, float(eps), tau_h, entry, exit_, tuple(param.pieces(entry, exit_)))


# -- principal values --------------------------------------------------------

def locate_on_path(f, cycle):
    """``[(singularity, hits), ...]`` for every declared singularity on the trace."""
    f = as_function(f)
    cycle = as_cycle(cycle)
    out = []
    for s in f.singularities:
        hits = find_hits(cycle, s.location)
        if hits:
            out.append((s, hits))
    return out


class _Subtraction:
    """Exact principal part (powers 2 and up) of one on-path singularity."""

    def __init__(self, f, s, scale):
        self.location = s.location
        r = s.radius or default_radius(f, s.location, scale)
        ks, c, _ = circle_coefficients(f, s.location, r, -N_CLS, TAYLOR_TERMS)
        thr = ZERO_TOL * float(np.max(np.abs(c)))
        a = {int(k): complex(ck / r ** k) for k, ck in zip(ks, c)}
        top = s.order if s.kind is SingularityKind.POLE else N_CLS
        self.principal = {k: a[-k] for k in range(2, top + 1) if abs(c[N_CLS - k]) > thr}
        self.series = {k: a[k] for k in range(-1, TAYLOR_TERMS + 1)}
        self._pcoeffs = {-k: v for k, v in self.principal.items()}
        self.rho = 0.5 * r

    def principal_part(self, z):
        if not self._pcoeffs:
            return np.zeros(np.shape(z), dtype=np.complex128)
        return evaluate_series(self._pcoeffs, np.asarray(z) - self.location)


def _regular_part(f, subs):
    if not subs:
        return f

    def g(z):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(all="ignore"):
            out = f(z) - sum(sub.principal_part(z) for sub in subs)
            for sub in subs:
                w = z - sub.location
                near = np.abs(w) < sub.rho
                if np.any(near):
                    val = evaluate_series(sub.series, w[near])
                    for other in subs:
                        if other is not sub:
                            val = val - other.principal_part(z[near])
                    out[near] = val
        return out

    return g


def _antiderivative(w, k):
    return w ** (1 - k) / (1 - k)


def _slope(eps, vals):
    x = np.log(1.0 / np.asarray(eps))
    y = np.log(np.abs(np.asarray(vals)))
    if x.size < 2:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def _linear_limit(eps, vals):
    """Intercept of ``a + b*eps`` fitted by least squares."""
    eps = np.asarray(eps, dtype=float)
    vals = np.asarray(vals, dtype=np.complex128)
    if eps.size == 1:
        return complex(vals[0])
    A = np.stack([np.ones_like(eps), eps], axis=1)
    coef, *_ = np.linalg.lstsq(A.astype(np.complex128), vals, rcond=None)
    return complex(coef[0])


def _classify_term(eps, T, noise):
    resolved = np.abs(T) > RESOLVE_FACTOR * noise
    idx = np.flatnonzero(resolved)
    if idx.size < 2:
        return "cancelled", 0j, None, resolved
    use = idx[-6:]
    slope = _slope(eps[use], T[use])
    if slope >= DIVERGENCE_SLOPE:
        return "divergent", None, slope, resolved
    fit = idx[-4:]
    return "convergent", _linear_limit(eps[fit], T[fit]), slope, resolved


def pv_integral(f, cycle, on_path=None, cfg=None):
    """Principal value of ``integral over cycle of f(z) dz``.

    ``on_path`` is a list of ``(singularity, hits)`` pairs; by default every
    declared singularity of ``f`` is searched for on the trace.
    """
    f = as_function(f)
    cycle = as_cycle(cycle)
    cfg = cfg or QuadratureConfig()
    if on_path is None:
        on_path = locate_on_path(f, cycle)
    groups = [(s, list(h)) for s, h in on_path if h]
    if not groups:
        value = line_integral(f, cycle, cfg, check_path=False)
        return PVResult(PVStatus.CONVERGED, value, None, [], {"on_path": 0})

    scale = cycle.scale
    eps = cfg.eps_schedule(scale)
    n_eps = eps.size

    subs = {}
    for gi, (s, _) in enumerate(groups):
        if s.kind is SingularityKind.POLE and s.order == 1:
            continue
        full = resolve(f, s, scale)
        if full.needs_subtraction:
            subs[gi] = _Subtraction(f, full, scale)
    g = _regular_part(f, list(subs.values()))

    reach = max(float(np.max(np.abs(c._samples))) for _, c in cycle.terms)
    dw = 64 * _U * (reach + scale)

    Q = np.zeros(n_eps, dtype=np.complex128)
    terms = {(gi, k): [np.zeros(n_eps, complex), np.zeros(n_eps), np.zeros(n_eps, complex)]
             for gi, sub in subs.items() for k in sub.principal}
    n_windows = 0

    for ci, (m, curve) in enumerate(cycle.terms):
        param = CurveParameter(curve)

        def span_integral(a, b, param=param, curve=curve):
            pieces = param.pieces(a, b)
            vals = ordered_map(lambda p: _segment_integral(g, curve.segments[p[0]], p[1], p[2], cfg), pieces)
            return complex(sum(vals))

        items = [(gi, h) for gi, (_, hits) in enumerate(groups) for h in hits if h.curve_index == ci]
        if not items:
            Q += m * span_integral(0.0, param.total)
            continue
        wins = [(gi, [exclusion_windows(curve, h, e, param) for e in eps]) for gi, h in items]
        wins.sort(key=lambda item: item[1][0].tau_hit)
        n_windows += len(wins)
        first = [w[0] for _, w in wins]
        base = 0j
        for i, w in enumerate(first):
            nxt = first[(i + 1) % len(first)]
            b = nxt.entry + (param.total if i == len(first) - 1 else 0.0)
            if b <= w.exit:
                raise OverlappingExclusions(
                    f"exclusion windows of radius {eps[0]:.3e} around {w.hit.point} and {nxt.hit.point} "
                    "overlap; lower eps0")
            base += span_integral(w.exit, b)
        q = np.empty(n_eps, dtype=np.complex128)
        q[0] = base
        for j in range(1, n_eps):
            add = 0j
            for _, ws in wins:
                add += span_integral(ws[j - 1].entry, ws[j].entry)
                add += span_integral(ws[j].exit, ws[j - 1].exit)
            q[j] = q[j - 1] + add
        Q += m * q

        for (gi_s, k), (own, noise, other) in terms.items():
            sub = subs[gi_s]
            a = sub.principal[k]
            for gi, ws in wins:
                for j, w in enumerate(ws):
                    w_in = param.point(w.entry) - sub.location
                    w_out = param.point(w.exit) - sub.location
                    term = m * a * (_antiderivative(w_in, k) - _antiderivative(w_out, k))
                    if gi == gi_s:
                        own[j] += term
                        noise[j] += abs(m * a) * (abs(w_in) ** -k + abs(w_out) ** -k) * dw
                    else:
                        other[j] += term

    for own, noise, other in terms.values():
        Q += other

    term_report = []
    divergent_slopes = []
    exact_total = 0j
    exact_trace = np.zeros(n_eps, dtype=np.complex128)
    for (gi, k), (own, noise, _) in terms.items():
        kind, contrib, slope, resolved = _classify_term(eps, own, noise)
        term_report.append({"singularity": groups[gi][0].location, "power": k, "behaviour": kind,
                            "slope": slope, "resolved": int(np.count_nonzero(resolved))})
        exact_trace += np.where(resolved, own, 0)
        if kind == "divergent":
            divergent_slopes.append(slope)
        elif kind == "convergent":
            exact_total += contrib

    trace = [(float(e), complex(v)) for e, v in zip(eps, Q + exact_trace)]
    diagnostics = {
        "on_path": len(groups),
        "windows": n_windows,
        "subtracted": [groups[gi][0].location for gi in subs],
        "terms": term_report,
        "regular_trace": [complex(v) for v in Q],
    }
    if divergent_slopes:
        return PVResult(PVStatus.DIVERGED, None, max(divergent_slopes), trace, diagnostics)

    limit = _linear_limit(eps[-4:], Q[-4:])
    d = np.abs(np.diff(Q))
    # an O(eps) tail shrinks by the schedule ratio per step
    factor = max(0.75, 0.5 * (1.0 + cfg.eps_ratio))
    contracting = bool(np.all(d[-3:][1:] <= factor * d[-3:][:-1] + 1e-13 * max(1.0, abs(limit))))
    small = d[-1] <= 1e-4 * max(1.0, abs(limit))
    diagnostics["last_increment"] = float(d[-1])
    if small or contracting:
        return PVResult(PVStatus.CONVERGED, limit + exact_total, None, trace, diagnostics)
    slope = _slope(eps[-6:], Q[-6:])
    if slope >= DIVERGENCE_SLOPE:
        return PVResult(PVStatus.DIVERGED, None, slope, trace, diagnostics)
    return PVResult(PVStatus.INCONCLUSIVE, None, None, trace, diagnostics)
