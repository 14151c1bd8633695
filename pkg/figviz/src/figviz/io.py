"""CSV reading with header validation and atomic PNG writing."""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError


def read_table(path: Path, columns: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Read a CSV whose header must equal exactly the expected columns.

    Returns one float64 array per column. Header mismatches and empty bodies
    are reported before any rendering starts, so a bad job never produces a
    half-drawn figure.
    """
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty, expected header {','.join(columns)}")
    header = tuple(rows[0])
    if header != columns:
        raise DataError(
            f"{path} has columns {','.join(header)}, expected {','.join(columns)}"
        )
    body = rows[1:]
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    try:
        values = np.array([[float(cell) for cell in row] for row in body], dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path} has a non-numeric cell: {exc}") from exc
    if values.shape[1] != len(columns):
        raise DataError(f"{path} has rows with {values.shape[1]} cells, expected {len(columns)}")
    return {name: values[:, k] for k, name in enumerate(columns)}


def atomic_write(out: Path, payload: bytes) -> None:
    """Write payload to out via a temporary file in the same directory, so a
    crash mid-write never leaves a truncated artifact behind."""
    out = Path(out)
    fd, tmp_name = tempfile.mkstemp(dir=out.parent, prefix=out.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp_name, out)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
