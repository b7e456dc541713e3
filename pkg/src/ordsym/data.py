"""Series ingestion and transforms."""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from .errors import EmptySeries, NonPositiveValue, ParseError


def _parse_float(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def read_csv_text(text: str, column: str | int | None = None, source: str = "<input>") -> np.ndarray:
    """Parse one numeric column from CSV text.

    ``column`` is a header name, a 0-based index, or ``None`` for the first
    column.  The first row is a header when a named column is requested or
    when its selected cell is not numeric; every later row must parse.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows:
        raise EmptySeries(f"{source}: no data rows")
    index: int
    start = 0
    if isinstance(column, str) and not column.strip().lstrip("-").isdigit():
        header = [h.strip() for h in rows[0]]
        if column not in header:
            raise ParseError(f"{source}: column {column!r} not found in header {header}", row=1, column=column)
        index = header.index(column)
        start = 1
    else:
        index = 0 if column is None else int(column)
        first = rows[0][index].strip() if index < len(rows[0]) else ""
        if _parse_float(first) is None:
            start = 1
    values = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        cell = row[index].strip() if index < len(row) else ""
        value = _parse_float(cell)
        if value is None:
            raise ParseError(f"{source}: row {lineno}, column {column if column is not None else 0}: cannot parse {cell!r} as a finite number", row=lineno, column=column)
        values.append(value)
    if not values:
        raise EmptySeries(f"{source}: no data rows")
    return np.array(values, dtype=float)


def ingest_csv(path: str | Path, column: str | int | None = None) -> np.ndarray:
    """Read a series from a CSV file, or from stdin when ``path`` is ``"-"``."""
    if str(path) == "-":
        return read_csv_text(sys.stdin.read(), column, "<stdin>")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    return read_csv_text(path.read_text(), column, str(path))


def log_returns(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    bad = np.flatnonzero(~(x > 0))
    if bad.size:
        raise NonPositiveValue(f"log returns need positive values; index {bad[0]} is {x[bad[0]]}", int(bad[0]))
    return np.diff(np.log(x))


def apply_transform(series, transform: str = "none") -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if transform in (None, "none"):
        return x
    if transform == "log-returns":
        return log_returns(x)
    if transform == "diff":
        return np.diff(x)
    raise ValueError(f"unknown transform {transform!r}")
