"""Canonical report serialization.

Reports must be byte-identical across runs with the same config, so JSON
emission avoids library formatting drift: keys are sorted, floats are
printed with 17 significant digits (round-trip exact for doubles), and
non-finite floats become quoted strings.  CSV output flattens the same
tree to one leaf per row.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import InvalidInputError

JSON_FORMAT = "json"
CSV_FORMAT = "csv"


def _scalar_text(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if bool(value) else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=True)
    if value is None:
        return "null"
    raise InvalidInputError(f"cannot serialize {type(value).__name__} scalar")


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, .17g floats, no whitespace drift."""
    if isinstance(obj, dict):
        parts = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise InvalidInputError("report keys must be strings")
            parts.append(f"{json.dumps(key)}:{canonical_json(obj[key])}")
        return "{" + ",".join(parts) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    return _scalar_text(obj)


def _flatten(obj, prefix: str, rows: list) -> None:
    if isinstance(obj, dict):
        for key in sorted(obj):
            path = f"{prefix}.{key}" if prefix else str(key)
            _flatten(obj[key], path, rows)
        return
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}[{i}]", rows)
        return
    text = _scalar_text(obj)
    if text.startswith('"'):
        text = json.loads(text)
    rows.append((prefix, text))


def canonical_csv(obj) -> str:
    """Flattened leaves, one per row, dotted/indexed paths in sorted order."""
    rows: list = []
    _flatten(obj, "", rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "value"])
    for path, text in rows:
        writer.writerow([path, text])
    return buf.getvalue()


def render_report(obj, fmt: str) -> str:
    if fmt == JSON_FORMAT:
        return canonical_json(obj) + "\n"
    if fmt == CSV_FORMAT:
        return canonical_csv(obj)
    raise InvalidInputError(f"unknown report format {fmt!r}")


def emit_report(obj, fmt: str, path: str | None) -> str:
    """Render and optionally write a report; returns the rendered text."""
    text = render_report(obj, fmt)
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InvalidInputError(f"cannot write report to {path}: {exc}") from exc
    return text
