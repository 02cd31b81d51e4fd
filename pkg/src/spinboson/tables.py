"""Comma-delimited numeric tables with ``#`` header lines.

The last ``#`` line before the data names the columns. Floats are written
with 17 significant digits so that re-reading is lossless.
"""

from __future__ import annotations

import datetime as _dt
from pathlib import Path

import numpy as np


def format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_table(path, columns, rows, timestamp: bool = True, comments=()):
    """Write ``rows`` (2-D array-like) under a ``# col1,col2,...`` header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if timestamp:
        now = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        lines.append(f"# generated {now}")
    lines.extend(f"# {c}" for c in comments)
    lines.append("# " + ",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} values for {len(columns)} columns")
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path):
    """Inverse of :func:`write_table`; returns ``(columns, data)``."""
    header = None
    data = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            header = line[1:].strip()
        elif line.strip():
            data.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header line")
    columns = header.split(",")
    arr = np.array(data, dtype=float).reshape(-1, len(columns))
    return columns, arr
