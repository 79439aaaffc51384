"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba implementations are used when numba imports cleanly and the
environment variable ``WINDLINE_DISABLE_NUMBA`` is unset (or ``0``).  Both
implementations are always importable as ``numpy_impl`` and ``numba_impl``
(the latter is ``None`` without numba) so tests can compare them.
"""

import os
import types

import numpy as np

# Gauss-Kronrod 15/7 on [-1, 1] (QUADPACK qk15 constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
GK_WEIGHTS_K = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_wg_full = np.zeros(8)
_wg_full[1::2] = _WG
GK_WEIGHTS_G = np.concatenate([_wg_full[:-1], [_wg_full[-1]], _wg_full[:-1][::-1]])


def _env_disabled():
    return os.environ.get("WINDLINE_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


# -- numpy reference path ----------------------------------------------------

def _np_gk15_reduce(fv):
    fv = np.asarray(fv, dtype=np.complex128)
    k = fv @ GK_WEIGHTS_K
    g = fv @ GK_WEIGHTS_G
    return k, np.abs(k - g)


def _np_polyline_winding(x, y, x0, y0):
    xa, ya = x[:-1], y[:-1]
    xb, yb = x[1:], y[1:]
    cross = (xb - xa) * (y0 - ya) - (x0 - xa) * (yb - ya)
    up = (ya <= y0) & (yb > y0) & (cross > 0)
    down = (ya > y0) & (yb <= y0) & (cross < 0)
    return int(np.count_nonzero(up)) - int(np.count_nonzero(down))


def _np_local_minima(d2):
    d2 = np.asarray(d2, dtype=np.float64)
    n = d2.size
    mask = np.ones(n, dtype=np.bool_)
    if n > 1:
        mask[1:] &= d2[1:] <= d2[:-1]
        mask[:-1] &= d2[:-1] <= d2[1:]
    return mask


def _np_bounded_integrand(x, y, dx, dy):
    return (x * dy - y * dx) / (x * x + y * y)


numpy_impl = types.SimpleNamespace(
    gk15_reduce=_np_gk15_reduce,
    polyline_winding=_np_polyline_winding,
    local_minima=_np_local_minima,
    bounded_integrand=_np_bounded_integrand,
)


# -- numba path --------------------------------------------------------------

def _build_numba():
    try:
        from numba import njit
    except ImportError:
        return None

    wk = GK_WEIGHTS_K.copy()
    wg = GK_WEIGHTS_G.copy()

    @njit(cache=True)
    def gk15_reduce(fv):
        n = fv.shape[0]
        k = np.empty(n, dtype=np.complex128)
        err = np.empty(n, dtype=np.float64)
        for i in range(n):
            sk = 0.0 + 0.0j
            sg = 0.0 + 0.0j
            for j in range(15):
                sk += wk[j] * fv[i, j]
                sg += wg[j] * fv[i, j]
            k[i] = sk
            err[i] = abs(sk - sg)
        return k, err

    @njit(cache=True)
    def polyline_winding(x, y, x0, y0):
        w = 0
        for i in range(x.shape[0] - 1):
            xa = x[i]
            ya = y[i]
            xb = x[i + 1]
            yb = y[i + 1]
            cross = (xb - xa) * (y0 - ya) - (x0 - xa) * (yb - ya)
            if ya <= y0:
                if yb > y0 and cross > 0:
                    w += 1
            elif yb <= y0 and cross < 0:
                w -= 1
        return w

    @njit(cache=True)
    def local_minima(d2):
        n = d2.shape[0]
        mask = np.ones(n, dtype=np.bool_)
        for i in range(n):
            if i > 0 and d2[i] > d2[i - 1]:
                mask[i] = False
            elif i < n - 1 and d2[i] > d2[i + 1]:
                mask[i] = False
        return mask

    @njit(cache=True)
    def bounded_integrand(x, y, dx, dy):
        out = np.empty(x.shape[0], dtype=np.float64)
        for i in range(x.shape[0]):
            out[i] = (x[i] * dy[i] - y[i] * dx[i]) / (x[i] * x[i] + y[i] * y[i])
        return out

    def _gk(fv):
        return gk15_reduce(np.ascontiguousarray(fv, dtype=np.complex128))

    def _poly(x, y, x0, y0):
        return int(polyline_winding(np.ascontiguousarray(x, dtype=np.float64),
                                    np.ascontiguousarray(y, dtype=np.float64),
                                    float(x0), float(y0)))

    def _minima(d2):
        return local_minima(np.ascontiguousarray(d2, dtype=np.float64))

    def _bounded(x, y, dx, dy):
        arrs = [np.ascontiguousarray(np.ravel(a), dtype=np.float64) for a in (x, y, dx, dy)]
        return bounded_integrand(*arrs).reshape(np.shape(x))

    return types.SimpleNamespace(
        gk15_reduce=_gk,
        polyline_winding=_poly,
        local_minima=_minima,
        bounded_integrand=_bounded,
    )


numba_impl = _build_numba()

if numba_impl is not None and not _env_disabled():
    BACKEND = "numba"
    active = numba_impl
else:
    BACKEND = "numpy"
    active = numpy_impl


def warm_up():
    """Run every active kernel once so JIT compilation happens up front."""
    t = np.linspace(0.0, 1.0, 4)
    active.gk15_reduce(np.zeros((1, 15), dtype=np.complex128))
    active.polyline_winding(t, t[::-1], 0.5, 0.25)
    active.local_minima(t)
    active.bounded_integrand(t + 1.0, t, t, t)


def gk15_reduce(fv):
    """Kronrod-15 sums and |K15 - G7| per row of ``fv`` (shape ``(n, 15)``) on [-1, 1]."""
    return active.gk15_reduce(fv)


def polyline_winding(x, y, x0, y0):
    """Signed crossing count of a closed polyline around ``(x0, y0)``."""
    return active.polyline_winding(x, y, x0, y0)


def local_minima(d2):
    return active.local_minima(d2)


def bounded_integrand(x, y, dx, dy):
    return active.bounded_integrand(x, y, dx, dy)
