"""CSV ingestion and JSON serialisation."""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
import math

import numpy as np

from .errors import ParseError


def _read_rows(path, header: bool):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path=path) from None
    start = 1 if header else 0
    out = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        vals = []
        for j, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"cannot parse {cell!r} as a number", path, i, j) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", path, i, j)
            vals.append(v)
        out.append((i, vals))
    if not out:
        raise ParseError("no data rows", path=path)
    return out


def read_matrix_csv(path, header: bool = False) -> np.ndarray:
    """One observation per row, no header unless ``header`` is set."""
    rows = _read_rows(path, header)
    width = len(rows[0][1])
    for i, vals in rows:
        if len(vals) != width:
            raise ParseError(f"expected {width} columns, found {len(vals)}", path, i)
    return np.array([v for _, v in rows], dtype=np.float64)


def read_vector_csv(path, header: bool = False) -> np.ndarray:
    rows = _read_rows(path, header)
    for i, vals in rows:
        if len(vals) != 1:
            raise ParseError(f"expected a single column, found {len(vals)}", path, i)
    return np.array([v[0] for _, v in rows], dtype=np.float64)


def _float(x: float):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x


def to_jsonable(obj):
    """Convert arrays, dataclasses and numpy scalars to plain JSON values.

    Matrices become ``{"shape": [r, c], "data": [[...], ...]}``; vectors are
    plain lists. Infinite and NaN floats become the strings "Infinity" and
    "NaN".
    """
    if isinstance(obj, np.ndarray):
        if obj.ndim >= 2:
            return {"shape": list(obj.shape), "data": to_jsonable(obj.tolist())}
        return [to_jsonable(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
