"""Deterministic JSON rendering with binary64-round-trip-safe numbers.

Floats render with 17 significant digits (%.17g), which is enough to
reconstruct the exact double; identical inputs therefore produce
byte-identical output.
"""

from __future__ import annotations

import json
import math

__all__ = ["render_json"]


def _render(obj, parts: list[str], indent: int, pad: str) -> None:
    here = pad * indent
    inner = pad * (indent + 1)
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite number in JSON payload: {obj}")
        parts.append(f"{obj:.17g}")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(obj):
            parts.append(inner)
            _render(item, parts, indent + 1, pad)
            parts.append(",\n" if i + 1 < len(obj) else "\n")
        parts.append(here + "]")
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            parts.append(inner + json.dumps(key) + ": ")
            _render(val, parts, indent + 1, pad)
            parts.append(",\n" if i + 1 < len(items) else "\n")
        parts.append(here + "}")
    else:
        # numpy scalars and anything else with a float/int view
        if hasattr(obj, "item"):
            _render(obj.item(), parts, indent, pad)
        else:
            raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def render_json(obj, indent: int = 2) -> str:
    parts: list[str] = []
    _render(obj, parts, 0, " " * indent)
    return "".join(parts) + "\n"
