"""Strict CSV intake: exact header match, loud failures, no reordering."""

from __future__ import annotations

import csv
from pathlib import Path

TRAJECTORY_HEADER = ["t", "re_beta", "im_beta", "phase", "s_z"]
FRINGE_HEADER = ["theta", "delta_phi", "contrast", "p0", "pplus", "pminus"]
THERMAL_HEADER = ["sample", "re_beta", "im_beta", "p0"]


class SchemaError(ValueError):
    """Input CSV does not carry the expected schema or is unusable."""


def read_rows(path: str | Path, expected_header: list[str]) -> list[dict[str, str]]:
    """Read a CSV whose header must match exactly; rows keep their raw strings.

    Values are kept verbatim so anything copied into figure annotations is
    byte-identical to the file; callers convert to float where needed.
    Row order is preserved as read.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: no header row") from None
        if header != expected_header:
            raise SchemaError(f"{path}: header {header!r} does not match the "
                              f"expected schema {expected_header!r}")
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(expected_header) or any(v == "" for v in row.values()):
            raise SchemaError(f"{path}: malformed row {i + 1}")
    return rows


def floats(rows: list[dict[str, str]], column: str) -> list[float]:
    try:
        return [float(row[column]) for row in rows]
    except ValueError as err:
        raise SchemaError(f"column {column!r} holds a non-numeric value: {err}") from None
