"""Piecewise-C1 curves and cycles, and pointwise geometry at hits.

A ``Segment`` is one C1 parametric piece; a ``ClosedCurve`` chains segments
end to start; a ``Cycle`` is an integer-weighted formal sum of closed curves.
All evaluators are expected to be vectorized over numpy arrays of parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .errors import (
    InsufficientSamples,
    InvalidCurve,
    MissingSecondDerivative,
    NonImmersion,
    TooManyHits,
)

TAU_JOIN = 1e-9
TAU_IMM = 1e-8
TAU_HIT = 1e-11
SCALE_SAMPLES = 257
HIT_GRID = 1024
MAX_HITS = 64
DEGENERATE_ANGLE = 1e-6

_FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)


def _evaluate(fn, t):
    t = np.asarray(t, dtype=float)
    out = np.asarray(fn(t), dtype=np.complex128)
    if out.shape != t.shape:
        out = np.broadcast_to(out, t.shape).copy()
    return out


@dataclass(frozen=True)
class Segment:
    """One C1 piece ``t -> eval(t)`` on ``[t0, t1]``."""

    eval: Callable
    deriv: Callable
    t0: float
    t1: float
    deriv2: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)) or not self.t0 < self.t1:
            raise InvalidCurve(f"segment needs t0 < t1, got [{self.t0}, {self.t1}]")

    @property
    def length(self):
        return self.t1 - self.t0

    def point(self, t):
        return _evaluate(self.eval, t)

    def velocity(self, t):
        return _evaluate(self.deriv, t)

    def acceleration(self, t, allow_fd=True):
        if self.deriv2 is not None:
            return _evaluate(self.deriv2, t)
        if not allow_fd:
            raise MissingSecondDerivative("segment has no second derivative and fallback is off")
        return self._fd_acceleration(np.asarray(t, dtype=float))

    def _fd_acceleration(self, t):
        # central where it fits inside the segment, second-order one-sided otherwise
        h = _FD_STEP * (1.0 + np.abs(t))
        out = np.empty(t.shape, dtype=np.complex128)
        fwd = t - h < self.t0
        bwd = t + h > self.t1
        cen = ~(fwd | bwd)
        d = self.velocity
        if np.any(cen):
            tc, hc = t[cen], h[cen]
            out[cen] = (d(tc + hc) - d(tc - hc)) / (2 * hc)
        if np.any(fwd):
            tf, hf = t[fwd], h[fwd]
            out[fwd] = (-3 * d(tf) + 4 * d(tf + hf) - d(tf + 2 * hf)) / (2 * hf)
        only_bwd = bwd & ~fwd
        if np.any(only_bwd):
            tb, hb = t[only_bwd], h[only_bwd]
            out[only_bwd] = (3 * d(tb) - 4 * d(tb - hb) + d(tb - 2 * hb)) / (2 * hb)
        return out

    def reversed(self):
        s = self.t0 + self.t1
        ev, dv, d2 = self.eval, self.deriv, self.deriv2
        return Segment(
            eval=lambda t: _evaluate(ev, s - np.asarray(t, dtype=float)),
            deriv=lambda t: -_evaluate(dv, s - np.asarray(t, dtype=float)),
            deriv2=None if d2 is None else (lambda t: _evaluate(d2, s - np.asarray(t, dtype=float))),
            t0=self.t0,
            t1=self.t1,
            label=self.label + "~" if self.label else "",
        )

    def restricted(self, a, b):
        return Segment(self.eval, self.deriv, float(a), float(b), self.deriv2, self.label)

    def mapped(self, a, b):
        """Image under ``z -> a*z + b``."""
        ev, dv, d2 = self.eval, self.deriv, self.deriv2
        return Segment(
            eval=lambda t: a * _evaluate(ev, t) + b,
            deriv=lambda t: a * _evaluate(dv, t),
            deriv2=None if d2 is None else (lambda t: a * _evaluate(d2, t)),
            t0=self.t0,
            t1=self.t1,
            label=self.label,
        )


class ClosedCurve:
    """Closed chain of segments, each ending where the next one starts."""

    def __init__(self, segments: Sequence[Segment], join_tol: float = TAU_JOIN, check: bool = True):
        self.segments = tuple(segments)
        if not self.segments:
            raise InvalidCurve("a closed curve needs at least one segment")
        self.join_tol = join_tol
        if check:
            self._check_joins()

    def __len__(self):
        return len(self.segments)

    def __repr__(self):
        return f"ClosedCurve({len(self.segments)} segments, scale={self.scale:.6g})"

    def _check_joins(self):
        n = len(self.segments)
        tol = self.join_tol * max(self.scale, 1e-300)
        for k, seg in enumerate(self.segments):
            nxt = self.segments[(k + 1) % n]
            end = seg.point(seg.t1)
            start = nxt.point(nxt.t0)
            if not (np.isfinite(end) and np.isfinite(start)):
                raise InvalidCurve(f"segment {k} has non-finite endpoint")
            if abs(end - start) > tol:
                what = "curve does not close" if k == n - 1 else f"segments {k} and {k + 1} do not join"
                raise InvalidCurve(f"{what}: gap {abs(end - start):.3e} > {tol:.3e}")

    @cached_property
    def _samples(self):
        pts = []
        for seg in self.segments:
            t = np.linspace(seg.t0, seg.t1, SCALE_SAMPLES)
            pts.append(seg.point(t))
        z = np.concatenate(pts)
        if not np.all(np.isfinite(z)):
            raise InvalidCurve("curve evaluates to non-finite values")
        return z

    @cached_property
    def scale(self):
        """Radius of the sampled trace about its centroid (translation invariant)."""
        z = self._samples
        r = float(np.max(np.abs(z - z.mean())))
        return r if r > 0 else float(np.max(np.abs(z)) or 1.0)

    def prev_index(self, k):
        return (k - 1) % len(self.segments)

    def next_index(self, k):
        return (k + 1) % len(self.segments)

    def reversed(self):
        return ClosedCurve([s.reversed() for s in reversed(self.segments)], self.join_tol, check=False)

    def mapped(self, a, b=0.0):
        return ClosedCurve([s.mapped(a, b) for s in self.segments], self.join_tol, check=False)

    def locate(self, t):
        """Index of the first segment whose parameter range contains ``t``."""
        for k, seg in enumerate(self.segments):
            if seg.t0 <= t <= seg.t1:
                return k
        raise ValueError(f"parameter {t} is outside every segment")


class Cycle:
    """Integer combination ``sum m_l * gamma_l`` of closed curves.

    Supports ``m * cycle``, ``cycle + cycle`` and ``-cycle``.
    """

    def __init__(self, terms):
        cleaned = []
        for m, curve in terms:
            if int(m) != m:
                raise InvalidCurve(f"multiplicity must be an integer, got {m!r}")
            if m == 0:
                raise InvalidCurve("multiplicities must be nonzero")
            if not isinstance(curve, ClosedCurve):
                raise InvalidCurve("cycle terms must be ClosedCurve instances")
            cleaned.append((int(m), curve))
        if not cleaned:
            raise InvalidCurve("empty cycle")
        self.terms = tuple(cleaned)

    @classmethod
    def of(cls, curve, multiplicity=1):
        return cls([(multiplicity, curve)])

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        other = as_cycle(other)
        return Cycle(self.terms + other.terms)

    def __rmul__(self, m):
        return Cycle([(m * k, c) for k, c in self.terms])

    def __neg__(self):
        return Cycle([(-k, c) for k, c in self.terms])

    def __repr__(self):
        return "Cycle(" + " + ".join(f"{m}*{c!r}" for m, c in self.terms) + ")"

    @property
    def curves(self):
        return [c for _, c in self.terms]

    @property
    def scale(self):
        return max(c.scale for _, c in self.terms)

    def reversed(self):
        return Cycle([(m, c.reversed()) for m, c in self.terms])

    def mapped(self, a, b=0.0):
        return Cycle([(m, c.mapped(a, b)) for m, c in self.terms])


def as_cycle(obj):
    if isinstance(obj, Cycle):
        return obj
    if isinstance(obj, ClosedCurve):
        return Cycle.of(obj)
    raise TypeError(f"expected Cycle or ClosedCurve, got {type(obj).__name__}")


def scale(curve_or_cycle):
    return curve_or_cycle.scale


# -- hits --------------------------------------------------------------------

@dataclass(frozen=True)
class Hit:
    curve_index: int
    segment_index: int
    t_star: float
    point: complex
    tangent_in: complex
    tangent_out: complex
    alpha: float
    at_breakpoint: bool = False
    degenerate: bool = False
    residual: float = 0.0
    # (segment index, parameter) on the side the curve arrives from
    incoming: tuple = field(default=(0, 0.0), repr=False, compare=False)


def _angle_between(tangent_in, tangent_out):
    a = float(np.angle(tangent_in / tangent_out)) % (2 * math.pi)
    return a


def _make_hit(curve, ci, k, t, z0, residual):
    segs = curve.segments
    seg = segs[k]
    at_bp = t == seg.t0
    v_out = complex(seg.velocity(t))
    if at_bp:
        kp = curve.prev_index(k)
        prev = segs[kp]
        v_in = complex(prev.velocity(prev.t1))
        incoming = (kp, prev.t1)
    else:
        v_in = v_out
        incoming = (k, t)
    if v_out == 0 or v_in == 0:
        raise NonImmersion(f"vanishing velocity at hit (curve {ci}, segment {k}, t={t})")
    t_out = v_out / abs(v_out)
    t_in = -v_in / abs(v_in)
    alpha = _angle_between(t_in, t_out)
    degenerate = alpha < DEGENERATE_ANGLE or alpha > 2 * math.pi - DEGENERATE_ANGLE
    return Hit(ci, k, float(t), complex(z0), t_in, t_out, alpha, bool(at_bp), bool(degenerate),
               float(residual), incoming=incoming)


def _refine(seg, z0, tc, a, b):
    for _ in range(80):
        r = complex(seg.point(tc)) - z0
        v = complex(seg.velocity(tc))
        vv = (v * v.conjugate()).real
        if vv == 0:
            break
        step = (r * v.conjugate()).real / vv
        tn = min(max(tc - step, a), b)
        if abs(tn - tc) <= 4e-16 * (1.0 + abs(tc)):
            tc = tn
            break
        tc = tn
    return tc, abs(complex(seg.point(tc)) - z0)


def find_hits(cycle, z0, tol=TAU_HIT, grid=HIT_GRID, max_hits=MAX_HITS):
    """All parameter locations where the cycle passes through ``z0``.

    Hits at a breakpoint are reported once, on the outgoing segment at its
    ``t0``.  Results are sorted by ``(curve_index, segment_index, t_star)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cycle = as_cycle(cycle)
    z0 = complex(z0)
    hits = []
    for ci, (_, curve) in enumerate(cycle.terms):
        thr = tol * curve.scale
        found = set()
        for k, seg in enumerate(curve.segments):
            t = np.linspace(seg.t0, seg.t1, grid + 1)
            z = seg.point(t)
            d2 = (z - z0).real ** 2 + (z - z0).imag ** 2
            dz = np.abs(np.diff(z))
            spacing = np.maximum(np.concatenate([[dz[0]], dz]), np.concatenate([dz, [dz[-1]]]))
            near = np.sqrt(d2) <= 2.0 * spacing + thr
            cand = np.flatnonzero(_kernels.local_minima(d2) & near)
            zero_run = np.sqrt(d2) <= thr
            if np.count_nonzero(zero_run[:-1] & zero_run[1:]) >= 2:
                raise NonImmersion(f"curve {ci} segment {k} stays at z0 over an interval")
            for i in cand:
                a = t[max(i - 1, 0)]
                b = t[min(i + 1, grid)]
                tc, res = _refine(seg, z0, float(t[i]), a, b)
                if res > thr and res < 4 * spacing[i]:
                    opt = minimize_scalar(lambda s: abs(complex(seg.point(s)) - z0) ** 2,
                                          bounds=(a, b), method="bounded",
                                          options={"xatol": 1e-14 * (1 + abs(t[i]))})
                    tc, res = _refine(seg, z0, float(opt.x), a, b)
                if res > thr:
                    continue
                kk = k
                span = seg.length
                if seg.t1 - tc <= 1e-10 * span:
                    kk = curve.next_index(k)
                    tc = curve.segments[kk].t0
                elif tc - seg.t0 <= 1e-10 * span:
                    tc = seg.t0
                key = None
                for (fk, ft) in found:
                    if fk == kk and abs(ft - tc) <= 1e-9 * curve.segments[kk].length:
                        key = (fk, ft)
                        break
                if key is not None:
                    continue
                found.add((kk, float(tc)))
                if len(found) > max_hits:
                    raise TooManyHits(f"more than {max_hits} hits of {z0} on curve {ci}")
                hits.append(_make_hit(curve, ci, kk, float(tc), z0, res))
        if len(hits) > max_hits:
            raise TooManyHits(f"more than {max_hits} hits of {z0}")
    hits.sort(key=lambda h: (h.curve_index, h.segment_index, h.t_star))
    return hits


def corner_angle(hit):
    """Positively oriented angle from the outgoing tangent to the reversed incoming one, in [0, 2pi)."""
    return _angle_between(hit.tangent_in, hit.tangent_out)


def signed_curvature(curve, t, segment_index=None, allow_fd=True):
    """(x'y'' - y'x'') / (x'^2 + y'^2)^(3/2) at parameter ``t``."""
    if isinstance(curve, Segment):
        seg = curve
    else:
        k = curve.locate(t) if segment_index is None else segment_index
        seg = curve.segments[k]
    v = seg.velocity(t)
    a = seg.acceleration(t, allow_fd=allow_fd)
    speed = np.abs(v)
    if np.any(speed == 0):
        raise NonImmersion("curvature undefined where the velocity vanishes")
    k = (np.conj(v) * a).imag / speed ** 3
    return float(k) if np.ndim(k) == 0 else k


# -- flatness ----------------------------------------------------------------

@dataclass(frozen=True)
class FlatnessResult:
    flat: bool
    exponent: float
    exponent_out: float
    exponent_in: float
    order: int

    def __bool__(self):
        return self.flat


def _side_exponent(seg, t_from, direction, z1, tangent, depth, noise):
    avail = (seg.t1 - t_from) if direction > 0 else (t_from - seg.t0)
    if avail <= 0:
        raise InsufficientSamples("no room to sample on one side of the hit")
    h0 = min(0.25 * avail, 1e-2 * seg.length)
    h = h0 * 0.5 ** np.arange(depth)
    z = seg.point(t_from + direction * h)
    w = z - z1
    r = np.abs(w)
    d = np.abs((w * np.conj(tangent)).imag)
    keep = (d > noise) & (r > 0)
    if np.count_nonzero(keep) < 2:
        return math.inf
    lr = np.log(r[keep])
    ld = np.log(d[keep])
    slope = np.polyfit(lr, ld, 1)[0]
    return float(slope)


def flatness_order(curve, hit, n, margin=0.25, depth=12):
    """Estimate whether the curve is flat of order ``n`` at ``hit``.

    Samples approach the hit from both sides at halving parameter offsets;
    the log-log slope of distance-to-tangent-line against distance-to-point
    must exceed ``n + margin`` on both sides.  Order 1 holds for every
    piecewise-C1 curve and is returned true regardless of the fit.
    """
    if n < 1:
        raise ValueError("flatness order must be >= 1")
    segs = curve.segments
    z1 = complex(segs[hit.segment_index].point(hit.t_star))
    noise = 64 * np.finfo(float).eps * (curve.scale + abs(z1))
    s_out = _side_exponent(segs[hit.segment_index], hit.t_star, +1, z1, hit.tangent_out, depth, noise)
    kin, tin = hit.incoming
    s_in = _side_exponent(segs[kin], tin, -1, z1, hit.tangent_in, depth, noise)
    exponent = min(s_out, s_in)
    flat = True if n == 1 else bool(s_out > n + margin and s_in > n + margin)
    return FlatnessResult(flat, exponent, s_out, s_in, int(n))


def coincides_with_tangents(curve, hit, radius, tol=1e-9, samples=64):
    """True if the curve lies on its one-sided tangent lines within ``radius`` of the hit."""
    segs = curve.segments
    z1 = complex(segs[hit.segment_index].point(hit.t_star))
    lim = tol * curve.scale

    def side(seg, t_from, direction, tangent):
        avail = (seg.t1 - t_from) if direction > 0 else (t_from - seg.t0)
        s = t_from + direction * np.linspace(0, avail, samples * 4 + 1)[1:]
        w = seg.point(s) - z1
        inside = np.abs(w) <= radius
        if not np.any(inside):
            return True
        return bool(np.all(np.abs((w[inside] * np.conj(tangent)).imag) <= lim))

    kin, tin = hit.incoming
    return side(segs[hit.segment_index], hit.t_star, +1, hit.tangent_out) and side(
        segs[kin], tin, -1, hit.tangent_in)


# -- immersion ---------------------------------------------------------------

@dataclass(frozen=True)
class ImmersionReport:
    ok: bool
    min_speed: float
    curve_index: int
    segment_index: int
    t: float
    threshold: float

    def raise_if_failed(self):
        if not self.ok:
            raise NonImmersion(
                f"|velocity| = {self.min_speed:.3e} < {self.threshold:.3e} "
                f"at curve {self.curve_index}, segment {self.segment_index}, t={self.t}")
        return self


def validate_immersion(cycle, n_check=SCALE_SAMPLES, tau=TAU_IMM, strict=False):
    cycle = as_cycle(cycle)
    best = (math.inf, 0, 0, 0.0)
    thr = tau * cycle.scale
    for ci, (_, curve) in enumerate(cycle.terms):
        for k, seg in enumerate(curve.segments):
            t = np.linspace(seg.t0, seg.t1, n_check)
            sp = np.abs(seg.velocity(t))
            i = int(np.argmin(sp))
            if sp[i] < best[0]:
                best = (float(sp[i]), ci, k, float(t[i]))
    report = ImmersionReport(best[0] >= thr, best[0], best[1], best[2], best[3], thr)
    if strict:
        report.raise_if_failed()
    return report
