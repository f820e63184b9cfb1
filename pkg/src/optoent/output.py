"""CSV / JSON writers with lossless float formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def dump_csv(fh, rows: list[dict], columns: list[str] | None = None) -> None:
    """One header row, then one row per record; missing fields are left empty."""
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])


def write_csv(path, rows: list[dict], columns: list[str] | None = None) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        dump_csv(fh, rows, columns)
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def jsonable(v):
    """Recursively convert numpy scalars/arrays and non-finite floats."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def payload_json(payload) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=1)


def write_json(path, payload, metadata: dict | None = None) -> Path:
    """``{"metadata": ..., "data": payload}``; run-dependent values belong in metadata."""
    path = Path(path)
    doc = {"metadata": jsonable(metadata or {}), "data": jsonable(payload)}
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path
