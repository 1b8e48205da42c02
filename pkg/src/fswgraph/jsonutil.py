"""Deterministic JSON serialization with fixed float formatting.

``dumps_stable`` emits byte-identical output for equal inputs: dict keys keep
insertion order (callers build documents in a fixed order), and floats are
rendered with 17 significant digits, enough to round-trip any IEEE double.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["dumps_stable"]


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(float(x), ".17g")


def _emit(obj) -> str:
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_emit(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_stable(obj) -> str:
    """Serialize ``obj`` to a canonical JSON string (no trailing newline)."""
    return _emit(obj)
