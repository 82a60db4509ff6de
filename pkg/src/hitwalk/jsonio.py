"""JSON rendering with reproducible float formatting.

Floats are written with 17 significant digits so that every double round-trips
bit-for-bit; integral values stay integers; NaN/inf become ``null``.
"""

from __future__ import annotations

import json
import math
from numbers import Integral, Real

import numpy as np


def _plain(obj):
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Integral):
        return int(obj)
    if isinstance(obj, Real):
        return float(obj)
    return obj


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    if obj is None or isinstance(obj, (bool, str, int)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        # numeric rows stay on one line: matrices remain readable
        if all(isinstance(x, (int, float)) or x is None for x in obj):
            return "[" + ", ".join(_encode(x, None, 0) for x in obj) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize ``obj`` (dicts, lists, numpy arrays, objects with ``to_dict``)."""
    return _encode(_plain(obj), indent, 0)
