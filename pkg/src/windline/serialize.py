"""Deterministic JSON output.

Floats are written with 17 significant digits so every double survives a
round trip; complex numbers become ``[re, im]`` pairs; non-finite values
become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

import dataclasses
import enum
import json
import math

import numpy as np


def _float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def to_plain(obj):
    """Convert library objects into JSON-ready builtins (complex kept as complex)."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return to_plain(obj.item())
    return obj


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return f"[{_float(obj.real)}, {_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        if all(isinstance(v, (int, float, complex, str)) or v is None for v in obj) and len(obj) <= 16:
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    return json.dumps(str(obj))


def dumps(obj, indent=2):
    return _encode(to_plain(obj), indent, 0) + "\n"


def complex_from_json(value):
    """Inverse of the ``[re, im]`` encoding (plain numbers are accepted too)."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)
