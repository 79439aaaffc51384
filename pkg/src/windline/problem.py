"""Problem descriptions: built-in fixtures and version-1 JSON problem files.

A problem bundles a function with its declared singularities, a cycle,
query points and quadrature overrides.  Numbers in a file may be plain
JSON numbers, ``[re, im]`` pairs or constant expressions such as
``"pi/2"`` or ``"1+2*i"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import curves
from .errors import ParseError, ProblemFileError, WindlineError
from .expr import evaluate_constant
from .geometry import Cycle
from .grt import sinc_sinh_function
from .integrate import QuadratureConfig
from .laurent import AnalyticFunction, Singularity

FORMAT_VERSION = 1
FIXTURES = ("zeppelin", "sector", "semicircle", "sinc-sinh")
_CONFIG_KEYS = ("abs_tol", "rel_tol", "max_subdivisions", "eps0", "eps_ratio", "eps_steps")


@dataclass
class Problem:
    function: AnalyticFunction
    cycle: Cycle
    points: list = field(default_factory=list)
    config: QuadratureConfig = field(default_factory=QuadratureConfig)
    exterior_probes: list = field(default_factory=list)
    label: str = ""


def _reciprocal(label="1/z"):
    return AnalyticFunction(lambda z: 1.0 / z, [Singularity.pole(0.0, 1, residue=1.0)], label=label)


def fixture(name, alpha=math.pi / 2, r=None):
    """One of the built-in problems by name."""
    if name == "zeppelin":
        return Problem(_reciprocal(), Cycle.of(curves.zeppelin()), [0j, -0.1 + 0j, 0.1 + 0j],
                       label="zeppelin")
    if name == "sector":
        r = 1.0 if r is None else r
        return Problem(_reciprocal(), Cycle.of(curves.model_sector(r, alpha)), [0j],
                       label=f"sector(r={r!r}, alpha={alpha!r})")
    if name == "semicircle":
        r = 1.0 if r is None else r
        return Problem(_reciprocal(), Cycle.of(curves.semicircle(r)), [0j], label=f"semicircle(r={r!r})")
    if name == "sinc-sinh":
        r = 20.0 if r is None else r
        return Problem(sinc_sinh_function(r=r), Cycle.of(curves.sinc_sinh_contour(r)), [0j],
                       label=f"sinc-sinh(r={r!r})")
    raise ProblemFileError(f"unknown fixture '{name}' (choose from {', '.join(FIXTURES)})")


# -- file reading ------------------------------------------------------------

def _fail(path, msg):
    err = ProblemFileError(f"{path}: {msg}")
    err.field = path
    return err


def _real(value, path):
    if isinstance(value, bool):
        raise _fail(path, "expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            z = evaluate_constant(value)
        except ParseError as exc:
            raise _fail(path, str(exc)) from exc
        if z.imag != 0:
            raise _fail(path, f"expected a real number, got {value!r}")
        return z.real
    raise _fail(path, "expected a number")


def _complex(value, path):
    if isinstance(value, list):
        if len(value) != 2:
            raise _fail(path, "complex numbers are [re, im] pairs")
        return complex(_real(value[0], f"{path}[0]"), _real(value[1], f"{path}[1]"))
    if isinstance(value, str):
        try:
            return evaluate_constant(value)
        except ParseError as exc:
            raise _fail(path, str(exc)) from exc
    return complex(_real(value, path))


def _positive(value, path):
    x = _real(value, path)
    if not x > 0:
        raise _fail(path, "must be positive")
    return x


def _get(obj, key, path, default=...):
    if not isinstance(obj, dict):
        raise _fail(path, "expected an object")
    if key not in obj:
        if default is ...:
            raise _fail(f"{path}.{key}", "missing")
        return default
    return obj[key]


def _angle(value, path):
    a = _real(value, path)
    if not 0 < a <= 2 * math.pi:
        raise _fail(path, "angle must lie in (0, 2*pi]")
    return a


def _piece(entry, path):
    kind = _get(entry, "type", path)
    if kind == "line":
        return curves.line(_complex(_get(entry, "from", path), f"{path}.from"),
                           _complex(_get(entry, "to", path), f"{path}.to"))
    if kind == "arc":
        return curves.arc(_complex(_get(entry, "center", path), f"{path}.center"),
                          _positive(_get(entry, "radius", path), f"{path}.radius"),
                          _real(_get(entry, "start", path), f"{path}.start"),
                          _real(_get(entry, "end", path), f"{path}.end"))
    raise _fail(f"{path}.type", f"unknown piece type {kind!r} (line or arc)")


def _curve(entry, path):
    kind = _get(entry, "type", path)
    if kind == "circle":
        return curves.circle(_complex(_get(entry, "center", path, 0), f"{path}.center"),
                             _positive(_get(entry, "radius", path, 1), f"{path}.radius"),
                             bool(_get(entry, "clockwise", path, False)))
    if kind == "piecewise":
        pieces = _get(entry, "pieces", path)
        if not isinstance(pieces, list) or not pieces:
            raise _fail(f"{path}.pieces", "expected a non-empty list")
        return curves.piecewise([_piece(p, f"{path}.pieces[{i}]") for i, p in enumerate(pieces)])
    if kind == "polygon":
        verts = _get(entry, "vertices", path)
        if not isinstance(verts, list) or len(verts) < 3:
            raise _fail(f"{path}.vertices", "need at least three vertices")
        return curves.polygon([_complex(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts)])
    if kind == "sector":
        return curves.model_sector(_positive(_get(entry, "r", path, 1), f"{path}.r"),
                                   _angle(_get(entry, "alpha", path, math.pi / 2), f"{path}.alpha"))
    if kind == "sinc_sinh":
        return curves.sinc_sinh_contour(_positive(_get(entry, "r", path, 20), f"{path}.r"))
    if kind == "semicircle":
        return curves.semicircle(_positive(_get(entry, "radius", path, 1), f"{path}.radius"),
                                 _complex(_get(entry, "center", path, 0), f"{path}.center"))
    if kind == "zeppelin":
        return curves.zeppelin()
    if kind == "expr":
        dom = _get(entry, "domain", path, [0, "2*pi"])
        if not isinstance(dom, list) or len(dom) != 2:
            raise _fail(f"{path}.domain", "expected [t0, t1]")
        domain = (_real(dom[0], f"{path}.domain[0]"), _real(dom[1], f"{path}.domain[1]"))
        try:
            if "z" in entry:
                return curves.from_expression(entry["z"], domain)
            return curves.from_expression(_get(entry, "x", path), domain, _get(entry, "y", path))
        except ParseError as exc:
            exc.field = path
            raise
    raise _fail(f"{path}.type", f"unknown curve type {kind!r}")


def _singularity(entry, path):
    loc = _complex(_get(entry, "location", path), f"{path}.location")
    order = _get(entry, "order", path, None)
    if order is not None and (isinstance(order, bool) or not isinstance(order, int) or order < 0):
        raise _fail(f"{path}.order", "expected a non-negative integer")
    res = _get(entry, "residue", path, None)
    res = None if res is None else _complex(res, f"{path}.residue")
    return Singularity.declared(loc, order, res)


def _function(entry, path):
    source = _get(entry, "expr", path)
    if not isinstance(source, str):
        raise _fail(f"{path}.expr", "expected expression text")
    sing = _get(entry, "singularities", path, [])
    if not isinstance(sing, list):
        raise _fail(f"{path}.singularities", "expected a list")
    declared = [_singularity(s, f"{path}.singularities[{i}]") for i, s in enumerate(sing)]
    try:
        return AnalyticFunction.from_expression(source, declared)
    except ParseError as exc:
        exc.field = f"{path}.expr"
        raise


def _config(entry, path):
    if not isinstance(entry, dict):
        raise _fail(path, "expected an object")
    unknown = sorted(set(entry) - set(_CONFIG_KEYS))
    if unknown:
        raise _fail(path, f"unknown keys {unknown}")
    values = {}
    for key, raw in entry.items():
        v = _real(raw, f"{path}.{key}")
        values[key] = int(v) if key in ("max_subdivisions", "eps_steps") else v
    try:
        return QuadratureConfig(**values)
    except (ValueError, WindlineError) as exc:
        raise _fail(path, str(exc)) from exc


def problem_from_dict(data, label=""):
    if not isinstance(data, dict):
        raise _fail("$", "top level must be an object")
    version = _get(data, "version", "$")
    if version != FORMAT_VERSION:
        raise _fail("$.version", f"unsupported version {version!r} (expected {FORMAT_VERSION})")
    f = _function(_get(data, "function", "$"), "$.function")
    terms = _get(data, "cycle", "$")
    if not isinstance(terms, list) or not terms:
        raise _fail("$.cycle", "expected a non-empty list")
    pairs = []
    for i, term in enumerate(terms):
        path = f"$.cycle[{i}]"
        m = _get(term, "multiplicity", path, 1)
        if isinstance(m, bool) or not isinstance(m, int):
            raise _fail(f"{path}.multiplicity", "expected an integer")
        pairs.append((m, _curve(_get(term, "curve", path), f"{path}.curve")))
    points = _get(data, "points", "$", [])
    probes = _get(data, "exterior_probes", "$", [])
    if not isinstance(points, list) or not isinstance(probes, list):
        raise _fail("$", "points and exterior_probes must be lists")
    return Problem(
        function=f,
        cycle=Cycle(pairs),
        points=[_complex(p, f"$.points[{i}]") for i, p in enumerate(points)],
        config=_config(_get(data, "config", "$", {}), "$.config"),
        exterior_probes=[_complex(p, f"$.exterior_probes[{i}]") for i, p in enumerate(probes)],
        label=label,
    )


def load_problem(path):
    """Read a problem file; syntax errors report line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        err = ProblemFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
        err.line, err.column = exc.lineno, exc.colno
        raise err from exc
    return problem_from_dict(data, label=str(path))
