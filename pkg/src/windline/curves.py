"""Constructors for common closed curves.

Every primitive carries analytic first and second derivatives.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidCurve
from .geometry import ClosedCurve, Cycle, Segment


def line(a, b, label="line"):
    """Unit-speed segment from ``a`` to ``b`` with ``t`` in ``[0, |b - a|]``."""
    a, b = complex(a), complex(b)
    length = abs(b - a)
    if length == 0:
        raise InvalidCurve("line segment needs distinct endpoints")
    u = (b - a) / length
    return Segment(
        eval=lambda t: a + u * t,
        deriv=lambda t: np.full(np.shape(t), u, dtype=np.complex128),
        deriv2=lambda t: np.zeros(np.shape(t), dtype=np.complex128),
        t0=0.0,
        t1=length,
        label=label,
    )


def arc(center, radius, theta0, theta1, label="arc"):
    """Circular arc ``center + radius*exp(i*theta)`` from ``theta0`` to ``theta1``.

    The parameter is the swept angle, ``t`` in ``[0, |theta1 - theta0|]``;
    ``theta1 < theta0`` runs clockwise.
    """
    c = complex(center)
    r = float(radius)
    if r <= 0:
        raise InvalidCurve("arc radius must be positive")
    sweep = float(theta1) - float(theta0)
    if sweep == 0:
        raise InvalidCurve("arc needs a nonzero sweep")
    s = math.copysign(1.0, sweep)
    th0 = float(theta0)
    return Segment(
        eval=lambda t: c + r * np.exp(1j * (th0 + s * np.asarray(t))),
        deriv=lambda t: 1j * s * r * np.exp(1j * (th0 + s * np.asarray(t))),
        deriv2=lambda t: -r * np.exp(1j * (th0 + s * np.asarray(t))),
        t0=0.0,
        t1=abs(sweep),
        label=label,
    )


def circle(center=0.0, radius=1.0, clockwise=False):
    """Full circle starting at ``center + radius``, ``t`` in ``[0, 2*pi]``."""
    return ClosedCurve([arc(center, radius, 0.0, -2 * math.pi if clockwise else 2 * math.pi, "circle")])


def polygon(vertices):
    pts = [complex(v) for v in vertices]
    if len(pts) < 3:
        raise InvalidCurve("a polygon needs at least three vertices")
    return ClosedCurve([line(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))])


def piecewise(segments):
    return ClosedCurve(list(segments))


def model_sector(r=1.0, alpha=math.pi / 2):
    """Radius out along the real axis, arc of opening ``alpha``, radius back to 0.

    The three pieces are ``t`` on ``[0, r]``, ``r*exp(i*t)`` on ``[0, alpha]``
    and ``(r - t)*exp(i*alpha)`` on ``[0, r]``.
    """
    r = float(r)
    alpha = float(alpha)
    if r <= 0:
        raise InvalidCurve("sector radius must be positive")
    if not 0 < alpha <= 2 * math.pi:
        raise InvalidCurve("sector angle must lie in (0, 2*pi]")
    return ClosedCurve([
        line(0.0, r, "radius-out"),
        arc(0.0, r, 0.0, alpha, "arc"),
        line(r * complex(math.cos(alpha), math.sin(alpha)), 0.0, "radius-in"),
    ])


def zeppelin():
    """``cos t + cos 2t + i sin 2t`` on ``[0, 2*pi]``; passes through 0 at ``t = pi``."""
    return ClosedCurve([Segment(
        eval=lambda t: np.cos(t) + np.cos(2 * t) + 1j * np.sin(2 * t),
        deriv=lambda t: -np.sin(t) - 2 * np.sin(2 * t) + 2j * np.cos(2 * t),
        deriv2=lambda t: -np.cos(t) - 4 * np.cos(2 * t) - 4j * np.sin(2 * t),
        t0=0.0,
        t1=2 * math.pi,
        label="zeppelin",
    )])


def sinc_sinh_legs(r):
    """The three legs of the quarter-plane wedge contour, in their own orientation.

    ``(1 - i) t`` and ``(1 + i) t`` for ``t`` in ``[0, r]``, joined by the arc
    ``sqrt(2) r exp(i t)``, ``t`` in ``[-pi/4, pi/4]``.
    """
    r = float(r)
    if r <= 0:
        raise InvalidCurve("contour radius must be positive")
    lower = Segment(
        eval=lambda t: (1 - 1j) * np.asarray(t, dtype=float),
        deriv=lambda t: np.full(np.shape(t), 1 - 1j, dtype=np.complex128),
        deriv2=lambda t: np.zeros(np.shape(t), dtype=np.complex128),
        t0=0.0, t1=r, label="lower-ray",
    )
    R = math.sqrt(2) * r
    outer = Segment(
        eval=lambda t: R * np.exp(1j * np.asarray(t)),
        deriv=lambda t: 1j * R * np.exp(1j * np.asarray(t)),
        deriv2=lambda t: -R * np.exp(1j * np.asarray(t)),
        t0=-math.pi / 4, t1=math.pi / 4, label="arc",
    )
    upper = Segment(
        eval=lambda t: (1 + 1j) * np.asarray(t, dtype=float),
        deriv=lambda t: np.full(np.shape(t), 1 + 1j, dtype=np.complex128),
        deriv2=lambda t: np.zeros(np.shape(t), dtype=np.complex128),
        t0=0.0, t1=r, label="upper-ray",
    )
    return lower, outer, upper


def sinc_sinh_contour(r=20.0):
    """Closed wedge ``lower + arc - upper`` with a right-angle corner at 0."""
    lower, outer, upper = sinc_sinh_legs(r)
    return ClosedCurve([lower, outer, upper.reversed()])


def semicircle(radius=1.0, center=0.0):
    """Diameter from ``center - radius`` to ``center + radius`` closed by the upper arc."""
    c = complex(center)
    return ClosedCurve([
        line(c - radius, c + radius, "diameter"),
        arc(c, radius, 0.0, math.pi, "arc"),
    ])


def from_expression(source, domain=(0.0, 2 * math.pi), y_source=None):
    """Closed curve from text in ``t``.

    With one expression it is the complex point ``z(t)``; with ``y_source``
    the pair is ``x(t) + i y(t)``.  Derivatives are symbolic.
    """
    from .expr import parse

    if y_source is None:
        z = parse(source, variable="t")
    else:
        x = parse(source, variable="t")
        y = parse(y_source, variable="t")
        from .expr import Binary, Const, Expr

        z = Expr(Binary("+", x.node, Binary("*", Const(1j, "i"), y.node)), "t")
    dz = z.derivative()
    d2z = dz.derivative()
    t0, t1 = float(domain[0]), float(domain[1])
    return ClosedCurve([Segment(
        eval=lambda t: z(np.asarray(t, dtype=float)),
        deriv=lambda t: dz(np.asarray(t, dtype=float)),
        deriv2=lambda t: d2z(np.asarray(t, dtype=float)),
        t0=t0, t1=t1, label=source,
    )])


def cycle(*terms):
    """``cycle(curve)`` or ``cycle((m1, c1), (m2, c2), ...)``."""
    if len(terms) == 1 and isinstance(terms[0], ClosedCurve):
        return Cycle.of(terms[0])
    return Cycle([(m, c) for m, c in terms])
