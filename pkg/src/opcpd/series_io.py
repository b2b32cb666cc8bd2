"""CSV ingestion and emission of univariate series.

Reading is strict: every value in the selected column must parse as a
finite real, and failures name the 1-based file row so the CLI can point
at the offending line. Writing uses 17 significant digits, which
round-trips float64 exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import isfinite

import numpy as np

from .exceptions import SeriesFormatError

FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class SeriesFile:
    """Where and how to read one numeric column.

    column: name (requires a header) or 0-based index; None selects the
            first column of the first data row that parses as a number.
    has_header: None auto-detects (a first row with any non-numeric cell
            is treated as a header).
    """

    path: str
    column: str | int | None = None
    has_header: bool | None = None
    delimiter: str = ","


def _parse_cell(cell: str, row_number: int, column: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise SeriesFormatError(
            f"row {row_number}: column {column} value {cell!r} is not a number",
            row=row_number) from None
    if not isfinite(value):
        raise SeriesFormatError(
            f"row {row_number}: column {column} value {cell!r} is not finite",
            row=row_number)
    return value


def _looks_numeric(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _resolve_column(first_data_row: list[str], header: list[str] | None,
                    column: str | int | None) -> int:
    if isinstance(column, int):
        if not 0 <= column < len(first_data_row):
            raise SeriesFormatError(
                f"--column index {column} out of range; rows have "
                f"{len(first_data_row)} columns")
        return column
    if isinstance(column, str):
        if header is None:
            raise SeriesFormatError(
                f"--column {column!r} is a name but the file has no header row")
        try:
            return header.index(column)
        except ValueError:
            raise SeriesFormatError(
                f"--column {column!r} not found in header {header}") from None
    for i, cell in enumerate(first_data_row):
        if _looks_numeric(cell):
            return i
    raise SeriesFormatError("no numeric column found in the first data row")


def read_series(spec: SeriesFile) -> np.ndarray:
    with open(spec.path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle, delimiter=spec.delimiter))
    if not rows:
        raise SeriesFormatError(f"{spec.path} is empty")

    has_header = spec.has_header
    if has_header is None:
        has_header = not all(_looks_numeric(cell) for cell in rows[0]) or not rows[0]
    header = rows[0] if has_header else None
    data_start = 1 if has_header else 0
    if len(rows) <= data_start:
        raise SeriesFormatError(f"{spec.path} has a header but no data rows")

    column = _resolve_column(rows[data_start], header, spec.column)
    values = np.empty(len(rows) - data_start, dtype=np.float64)
    for offset, row in enumerate(rows[data_start:]):
        row_number = data_start + offset + 1
        if column >= len(row):
            raise SeriesFormatError(
                f"row {row_number}: only {len(row)} columns, need column {column}",
                row=row_number)
        values[offset] = _parse_cell(row[column], row_number, column)
    return values


def write_series(values, handle, header: str = "value") -> None:
    handle.write(header + "\n")
    for value in np.asarray(values, dtype=np.float64):
        handle.write(FLOAT_FORMAT % value + "\n")


def write_scan_csv(scan, handle) -> None:
    handle.write("split_index,m_prime,n_prime,mmd,cmmd\n")
    for i in range(scan.n_windows - 1):
        m_prime, n_prime = scan.split(i)
        handle.write("%d,%d,%d,%s,%s\n" % (
            i, m_prime, n_prime,
            FLOAT_FORMAT % scan.mmd[i], FLOAT_FORMAT % scan.cmmd[i]))
