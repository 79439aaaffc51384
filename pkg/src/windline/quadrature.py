"""Globally adaptive Gauss-Kronrod 15/7 quadrature for complex integrands.

The integrand is evaluated in batches (all new subintervals of one sweep at
once), so callables must accept a 1-d numpy array of parameters.
"""

import numpy as np

from . import _kernels
from .errors import NoConvergence, NonFiniteIntegrand

_EPS = np.finfo(float).eps


def _rule(func, lo, hi):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    nodes = c[:, None] + h[:, None] * _kernels.GK_NODES
    fv = np.asarray(func(nodes.ravel()), dtype=np.complex128).reshape(nodes.shape)
    if not np.all(np.isfinite(fv)):
        bad = nodes[~np.isfinite(fv)]
        raise NonFiniteIntegrand(f"integrand is not finite at t={bad[0]!r}")
    k, kg = _kernels.gk15_reduce(fv)
    # QUADPACK error heuristic on the magnitude of |K15 - G7|
    mean = k / 2.0
    resabs = np.abs(fv) @ _kernels.GK_WEIGHTS_K
    resasc = np.abs(fv - mean[:, None]) @ _kernels.GK_WEIGHTS_K
    err = kg.copy()
    pos = resasc > 0
    err[pos] = resasc[pos] * np.minimum(1.0, (200.0 * kg[pos] / resasc[pos]) ** 1.5)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    improvable = (err > floor) & (h > 8 * _EPS * np.maximum(np.abs(c), 1.0))
    return k * h, err * h, resabs * h, improvable


def integrate(func, a, b, abs_tol=1e-11, rel_tol=1e-11, max_intervals=4000):
    """Integrate ``func`` over ``[a, b]``; return ``(value, error_estimate)``.

    Raises NoConvergence when the interval budget runs out before the error
    estimate drops below ``max(abs_tol, rel_tol*|value|)``.
    """
    a = float(a)
    b = float(b)
    if b == a:
        return 0j, 0.0
    if b < a:
        val, err = integrate(func, b, a, abs_tol, rel_tol, max_intervals)
        return -val, err

    lo = np.array([a])
    hi = np.array([b])
    k, e, _, imp = _rule(func, lo, hi)
    while True:
        total = k.sum()
        etot = e.sum()
        tol = max(abs_tol, rel_tol * abs(total))
        if etot <= tol:
            break
        cand = np.flatnonzero(imp)
        if cand.size == 0:
            break  # round-off limited
        order = cand[np.argsort(-e[cand], kind="stable")]
        need = etot - 0.5 * tol
        m = int(np.searchsorted(np.cumsum(e[order]), need)) + 1
        pick = np.sort(order[:m])
        if lo.size + pick.size > max_intervals:
            raise NoConvergence(
                f"adaptive quadrature on [{a}, {b}] exceeded {max_intervals} subintervals "
                f"(error {etot:.3e} > tol {tol:.3e})")
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        nk, ne, _, nimp = _rule(func, new_lo, new_hi)
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        k = np.concatenate([k[keep], nk])
        e = np.concatenate([e[keep], ne])
        imp = np.concatenate([imp[keep], nimp])
        # deterministic summation order: by left endpoint
        srt = np.argsort(lo, kind="stable")
        lo, hi, k, e, imp = lo[srt], hi[srt], k[srt], e[srt], imp[srt]
    return complex(k.sum()), float(e.sum())


def gauss_legendre(func, a, b, order=16):
    """Fixed-order Gauss-Legendre rule (no adaptivity, nodes never touch the ends)."""
    x, w = np.polynomial.legendre.leggauss(order)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    vals = np.asarray(func(c + h * x))
    return h * np.dot(w, vals)
