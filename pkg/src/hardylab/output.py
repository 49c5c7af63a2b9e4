"""Machine-readable emitters with 17 significant digits for every float.

JSON keeps key order as given and writes non-finite floats as ``null``.  CSV
files carry a ``schema`` column whose value names the row layout and its
version, so downstream parsers can reject files they do not understand.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "CSV_SCHEMAS",
    "format_float",
    "to_json",
    "to_csv",
    "to_table",
]

CSV_SCHEMAS: dict[str, tuple[str, ...]] = {
    "report/1": (
        "name", "lhs", "rhs", "margin", "relative_margin", "satisfied", "rel_tol", "params", "extras",
    ),
    "sweep/1": ("label", "parameter", "lhs", "rhs", "value", "limit", "deviation"),
    "p0/1": ("q", "M", "p0", "residual", "iterations"),
    "batch/1": ("checker", "total", "satisfied", "worst_relative_margin", "worst_index", "worst_case"),
    "muck/1": ("q", "t", "value"),
}


def format_float(x: float) -> str:
    s = f"{x:.17g}"
    # keep integral values recognisable as floats when re-parsed
    return s if any(ch in s for ch in ".en") else s + ".0"


def _plain(obj: Any) -> Any:
    """Convert numpy scalars and arrays to builtin types."""
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _emit(obj: Any, out: list[str]) -> None:
    if obj is None or obj is True or obj is False:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, Mapping):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k), ensure_ascii=False) + ": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj: Any) -> str:
    out: list[str] = []
    _emit(_plain(obj), out)
    return "".join(out) + "\n"


def _cell(v: Any) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else "nan"
    if v is None:
        return ""
    if isinstance(v, (Mapping, list)):
        return to_json(v).rstrip("\n")
    return str(v)


def to_csv(schema: str, rows: Iterable[Mapping[str, Any]]) -> str:
    cols = CSV_SCHEMAS[schema]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("schema",) + cols)
    for row in rows:
        w.writerow([schema] + [_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def to_table(rows: Sequence[Mapping[str, Any]], cols: Sequence[str]) -> str:
    """Aligned plain-text table with 10 significant digits."""

    def fmt(v: Any) -> str:
        v = _plain(v)
        if isinstance(v, bool) or v is None:
            return str(v)
        if isinstance(v, float):
            return f"{v:.10g}"
        if isinstance(v, (Mapping, list)):
            return to_json(v).rstrip("\n")
        return str(v)

    cells = [[fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"
