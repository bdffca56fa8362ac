"""CSV/JSON ingestion and emission.

Floats are written with 17 significant digits so every double round-trips
exactly through :func:`read_table`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch


def fmt(v) -> str:
    """Format one cell; floats at 17 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def parse_cell(s: str):
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_table(path) -> tuple[list[str], list[list]]:
    """Read a headed CSV; numeric-looking cells become int/float."""
    with _open_in(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{i}: expected {len(header)} fields, got {len(r)}")
        body.append([parse_cell(c) for c in r])
    return header, body


def read_column(path, column: str | int = 0) -> np.ndarray:
    """One numeric column; a headerless single-column file is also accepted."""
    with _open_in(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    first = [parse_cell(c) for c in rows[0]]
    has_header = any(isinstance(c, str) for c in first)
    header = [h.strip() for h in rows[0]] if has_header else None
    body = rows[1:] if has_header else rows
    if isinstance(column, str):
        if header is None or column not in header:
            raise ValueError(f"{path}: no column {column!r}")
        j = header.index(column)
    else:
        j = column
    try:
        return np.array([float(r[j]) for r in body])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: non-numeric value in column {column!r}") from exc


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a CSV; ``path`` of ``None`` or ``-`` writes to stdout."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    _write_text(path, buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    _write_text(path, json.dumps(_jsonable(obj), indent=2) + "\n")


def emit_plot_data(path, x, **series) -> None:
    """Tidy ``x,series,value`` CSV for plotting.

    Raises:
        LengthMismatch: a series differs in length from ``x``.
        ValueError: no series, or empty ``x``.
    """
    xs = np.asarray(x, dtype=float).ravel()
    if not series:
        raise ValueError("at least one series is required")
    if xs.size == 0:
        raise ValueError("empty series")
    cols = {}
    for name, vals in series.items():
        v = np.asarray(vals, dtype=float).ravel()
        if v.size != xs.size:
            raise LengthMismatch(f"series {name!r} has length {v.size}, x has {xs.size}")
        cols[name] = v
    rows = [(xv, name, v[i]) for name, v in cols.items() for i, xv in enumerate(xs)]
    write_table(path, ["x", "series", "value"], rows)


def read_plot_data(path) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    header, rows = read_table(path)
    if header != ["x", "series", "value"]:
        raise ValueError(f"{path}: not a plot-data file")
    out: dict[str, tuple[list, list]] = {}
    for x, name, v in rows:
        xs, vs = out.setdefault(str(name), ([], []))
        xs.append(float(x))
        vs.append(float(v))
    return {k: (np.array(a), np.array(b)) for k, (a, b) in out.items()}


def _open_in(path):
    if path is None or str(path) == "-":
        return io.StringIO(sys.stdin.read())
    return open(Path(path), newline="")


def _write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
