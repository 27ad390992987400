"""Deterministic JSON, CSV and aligned-table rendering."""
from __future__ import annotations

import csv
import io
import json
import math


def _normalize(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "+∞" if obj > 0 else "-∞"
        return round(obj, 4)
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _normalize(obj.to_json())
    return obj


def to_json(obj) -> str:
    """JSON text with floats rounded to 4 decimals; key order is the builder's."""
    return json.dumps(_normalize(obj), indent=2, ensure_ascii=False) + "\n"


def fmt_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ",".join(fmt_cell(v) for v in value)
    if isinstance(value, dict):
        return " ".join(f"{k}={fmt_cell(v)}" for k, v in value.items())
    return str(value)


def render_table(headers, rows) -> str:
    cells = [[fmt_cell(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for k, c in enumerate(row):
            widths[k] = max(widths[k], len(c))
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()  # noqa: E731
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in cells)
    return "\n".join(out) + "\n"


def to_csv(headers, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([fmt_cell(c) for c in row])
    return buf.getvalue()
