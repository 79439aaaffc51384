"""Laurent coefficients on circles, singularity classification, residues.

Coefficients are keyed by the power of ``(z - z0)``: ``coeffs[-1]`` is the
residue, ``coeffs[-n]`` multiplies ``(z - z0)**-n`` and ``coeffs[j]`` for
``j >= 0`` is the Taylor part.  They come from the trapezoidal rule on an
M-point circle, which converges geometrically for functions analytic on a
neighbourhood of the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import AnnulusViolation, NoConvergence, NonFiniteIntegrand

N_CLS = 24
COEFF_TOL = 1e-10
ZERO_TOL = 1e-10
M_START = 64
M_MAX = 8192


class SingularityKind(str, Enum):
    UNCLASSIFIED = "Unclassified"
    REMOVABLE = "Removable"
    POLE = "Pole"
    ESSENTIAL = "EssentialTruncated"


@dataclass(frozen=True)
class Singularity:
    """An isolated singular point of a function plus whatever is known about it."""

    location: complex
    kind: SingularityKind = SingularityKind.UNCLASSIFIED
    order: Optional[int] = None
    laurent: Mapping[int, complex] = field(default_factory=dict, compare=False)
    residue: Optional[complex] = None
    radius: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "location", complex(self.location))
        if self.kind is SingularityKind.POLE and (self.order is None or self.order < 1):
            raise ValueError("a pole needs an order >= 1")

    @classmethod
    def pole(cls, location, order=1, residue=None, laurent=None, label=""):
        coeffs = dict(laurent or {})
        if residue is not None:
            coeffs.setdefault(-1, complex(residue))
        if order == 1 and residue is not None:
            coeffs = {k: v for k, v in coeffs.items() if k >= -1}
        return cls(complex(location), SingularityKind.POLE, int(order), coeffs,
                   None if residue is None else complex(residue), label=label)

    @classmethod
    def declared(cls, location, order=None, residue=None, label=""):
        """A user declaration; anything left as None is extracted numerically later."""
        if order is not None and order >= 1:
            return cls.pole(location, order, residue, label=label)
        if order == 0:
            return cls(complex(location), SingularityKind.REMOVABLE, 0, {}, 0j if residue is None else complex(residue), label=label)
        return cls(complex(location), residue=None if residue is None else complex(residue), label=label)

    @property
    def classified(self):
        return self.kind is not SingularityKind.UNCLASSIFIED

    @property
    def principal_indices(self):
        """Indices n >= 1 with a nonzero coefficient of ``(z - z0)**-n``."""
        return sorted(-k for k, v in self.laurent.items() if k < 0 and v != 0)

    @property
    def needs_subtraction(self):
        """True when the principal part goes beyond a simple pole."""
        if self.kind is SingularityKind.ESSENTIAL:
            return True
        return self.kind is SingularityKind.POLE and self.order >= 2

    def describe(self):
        if self.kind is SingularityKind.POLE:
            return f"Pole({self.order})"
        return self.kind.value


class AnalyticFunction:
    """A vectorized complex map with its declared singular points."""

    def __init__(self, func: Callable, singularities: Sequence = (), label: str = ""):
        self.func = func
        self.singularities = tuple(
            s if isinstance(s, Singularity) else Singularity.declared(s) for s in singularities)
        self.label = label

    def __call__(self, z):
        arr = np.asarray(z, dtype=np.complex128)
        with np.errstate(all="ignore"):
            out = np.asarray(self.func(arr), dtype=np.complex128)
        if out.shape != arr.shape:
            out = np.broadcast_to(out, arr.shape).copy()
        if np.ndim(z) == 0:
            return complex(out)
        return out

    def __repr__(self):
        return f"AnalyticFunction({self.label or self.func!r}, {len(self.singularities)} singularities)"

    @classmethod
    def from_expression(cls, source, singularities=()):
        from .expr import parse

        e = parse(source, variable="z")
        return cls(e, singularities, label=source)

    def with_singularities(self, singularities):
        return AnalyticFunction(self.func, singularities, self.label)

    def probe(self, probe_radius=1e-3, n=16):
        """Spot-check finiteness on small circles around each declared singularity."""
        theta = 2 * np.pi * np.arange(n) / n
        for s in self.singularities:
            vals = self(s.location + probe_radius * np.exp(1j * theta))
            if not np.all(np.isfinite(vals)):
                return False
        return True


def as_function(f):
    if isinstance(f, AnalyticFunction):
        return f
    if isinstance(f, str):
        return AnalyticFunction.from_expression(f)
    if callable(f):
        return AnalyticFunction(f)
    raise TypeError(f"cannot interpret {f!r} as a function")


# -- extraction --------------------------------------------------------------

def _others(f, z0):
    tiny = 1e-12 * max(1.0, abs(z0))
    return [abs(s.location - z0) for s in f.singularities if abs(s.location - z0) > tiny]


def default_radius(f, z0, scale=1.0):
    """Half the distance to the nearest other declared singularity, else ``scale/2``."""
    f = as_function(f)
    d = _others(f, complex(z0))
    r = 0.5 * min(d) if d else 0.5 * scale
    return min(r, 0.5 * scale) if scale > 0 else r


def _check_annulus(f, z0, radius):
    if not radius > 0:
        raise ValueError("radius must be positive")
    for d in _others(f, z0):
        if d <= radius * (1 + 1e-9):
            raise AnnulusViolation(
                f"another declared singularity lies {d:.6g} from {z0}, inside radius {radius:.6g}")


def circle_coefficients(f, z0, radius, kmin, kmax, coeff_tol=COEFF_TOL, m_max=M_MAX):
    """Normalized coefficients ``c_k = a_k * radius**k`` for ``kmin <= k <= kmax``.

    Returns ``(ks, c, m)`` with the sample count ``m`` at which successive
    doublings agreed to ``coeff_tol`` relative to ``max |c|``.
    """
    span = kmax - kmin + 1
    m = M_START
    while m < 2 * span:
        m *= 2
    ks = np.arange(kmin, kmax + 1)
    prev = None
    while m <= m_max:
        w = radius * np.exp(2j * np.pi * np.arange(m) / m)
        vals = np.asarray(f(z0 + w), dtype=np.complex128)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteIntegrand(f"function is not finite on the circle |z - {z0}| = {radius}")
        c = np.fft.fft(vals)[ks % m] / m
        if prev is not None:
            ref = max(float(np.max(np.abs(c))), np.finfo(float).tiny)
            if float(np.max(np.abs(c - prev))) <= coeff_tol * ref:
                return ks, c, m
        prev = c
        m *= 2
    raise NoConvergence(f"Laurent coefficients did not settle with {m_max} samples")


def laurent_coeffs(f, z0, radius=None, index_range=(-N_CLS, N_CLS), coeff_tol=COEFF_TOL,
                   zero_tol=ZERO_TOL, scale=1.0, m_max=M_MAX):
    """Laurent coefficients ``{k: a_k}`` of ``f`` about ``z0``.

    Coefficients whose normalized size ``|a_k| radius**k`` falls below
    ``zero_tol`` times the largest one are reported as exact zeros; pass
    ``zero_tol=0`` for the raw values.
    """
    f = as_function(f)
    z0 = complex(z0)
    r = default_radius(f, z0, scale) if radius is None else float(radius)
    _check_annulus(f, z0, r)
    kmin, kmax = index_range
    ks, c, _ = circle_coefficients(f, z0, r, kmin, kmax, coeff_tol, m_max)
    thr = zero_tol * float(np.max(np.abs(c)))
    out = {}
    for k, ck in zip(ks.tolist(), c):
        out[k] = 0j if abs(ck) <= thr else complex(ck / r ** k)
    return out


def _apparent_order(c_neg, thr):
    nz = np.flatnonzero(np.abs(c_neg) > thr)
    return int(nz.max()) + 1 if nz.size else 0


def classify(f, z0, radius=None, n_cls=N_CLS, scale=1.0, zero_tol=ZERO_TOL):
    """Classify the singularity of ``f`` at ``z0``.

    The apparent order (largest index with a coefficient above threshold)
    is read at radii r, r/4 and r/16.  A pole keeps its order as the circle
    shrinks; an essential singularity keeps revealing deeper terms until
    the truncation depth is reached.  Poles of order ``n_cls - 1`` and up
    are indistinguishable from truncated essential singularities.
    """
    f = as_function(f)
    z0 = complex(z0)
    r = default_radius(f, z0, scale) if radius is None else float(radius)
    _check_annulus(f, z0, r)
    orders = []
    for rr in (r, r / 4, r / 16):
        ks, c, _ = circle_coefficients(f, z0, rr, -n_cls, n_cls)
        thr = zero_tol * float(np.max(np.abs(c)))
        neg = c[:n_cls][::-1]  # c_{-1}, ..., c_{-n_cls}
        orders.append(_apparent_order(neg, thr))
    coeffs = laurent_coeffs(f, z0, r, (-n_cls, n_cls), zero_tol=zero_tol)
    # top two indices: a principal part with only odd (or even) terms tops out at n_cls - 1
    if max(orders) >= n_cls - 1 or orders[2] > orders[1] > orders[0]:
        kind, order = SingularityKind.ESSENTIAL, None
    elif orders[-1] == 0:
        kind, order = SingularityKind.REMOVABLE, 0
    else:
        kind, order = SingularityKind.POLE, orders[-1]
        coeffs = {k: (0j if k < -order else v) for k, v in coeffs.items()}
    return Singularity(z0, kind, order, coeffs, coeffs.get(-1, 0j), r)


def residue(f, z0, radius=None, scale=1.0):
    """Coefficient of ``1/(z - z0)``."""
    return laurent_coeffs(f, z0, radius, (-N_CLS, N_CLS), scale=scale)[-1]


def resolve(f, s, scale=1.0, radius=None):
    """Fill in classification and Laurent data for a declared singularity.

    Declared order and residue are kept; the rest is extracted.
    """
    f = as_function(f)
    if s.classified and s.residue is not None and (s.order == 1 or s.laurent and len(s.laurent) > 1):
        return s
    found = classify(f, s.location, radius, scale=scale)
    if s.kind is SingularityKind.POLE and s.order is not None:
        coeffs = {k: (0j if k < -s.order else v) for k, v in found.laurent.items()}
        found = replace(found, kind=SingularityKind.POLE, order=s.order, laurent=coeffs,
                        residue=coeffs.get(-1, 0j))
    if s.residue is not None:
        coeffs = dict(found.laurent)
        coeffs[-1] = s.residue
        found = replace(found, residue=s.residue, laurent=coeffs)
    return replace(found, label=s.label)


def evaluate_series(coeffs, w):
    """Sum ``a_k w**k`` over the given coefficients (negative powers allowed)."""
    w = np.asarray(w, dtype=np.complex128)
    pos = sorted(k for k in coeffs if k >= 0)
    neg = sorted((-k for k in coeffs if k < 0), reverse=True)
    out = np.zeros(w.shape, dtype=np.complex128)
    if pos:
        for k in range(pos[-1], -1, -1):
            out = out * w + coeffs.get(k, 0j)
    if neg:
        inv = 1.0 / w
        acc = np.zeros(w.shape, dtype=np.complex128)
        for n in range(neg[0], 0, -1):
            acc = (acc + coeffs.get(-n, 0j)) * inv
        out = out + acc
    return out

