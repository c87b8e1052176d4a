"""The four result CSV schemas and strict readers for them.

This package talks to the simulator exclusively through these files, so
every reader validates the header before touching a row and raises
RenderError with the offending path in the message.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path


class RenderError(ValueError):
    """Input file missing, malformed, or not matching a documented schema."""


SCHEMAS = {
    "per_slot": ("slot", "unix_time_s", "solver", "aggregate_rate_ebits_s",
                 "mean_fidelity", "num_connections", "max_sats_per_pair",
                 "max_pairs_per_sat"),
    "assignments": ("slot", "satellite_id", "pair_id", "x",
                    "weight_ebits_s", "fidelity"),
    "longevity": ("duration_slots", "count"),
    "stations": ("station_id", "lat_deg", "lon_deg", "receivers",
                 "mean_connections"),
}


def parse_number(cell: str):
    """Empty cells mean no value, "unbounded" means infinity."""
    if cell == "":
        return None
    if cell == "unbounded":
        return math.inf
    try:
        return float(cell)
    except ValueError:
        raise RenderError(f"cannot parse numeric cell {cell!r}") from None


def read_header(path) -> tuple:
    path = Path(path)
    if not path.is_file():
        raise RenderError(f"{path}: no such file")
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise RenderError(f"{path}: empty file, expected a CSV header")
    return tuple(header)


def sniff_schema(path) -> str | None:
    """Schema name whose header matches the file, or None."""
    header = read_header(path)
    for name, columns in SCHEMAS.items():
        if header == columns:
            return name
    return None


def load_rows(path, schema: str) -> list:
    """All data rows of a schema-checked CSV, as per-column dicts of
    raw strings. Headers-only files load as an empty list."""
    columns = SCHEMAS[schema]
    header = read_header(path)
    if header != columns:
        raise RenderError(
            f"{path}: header {', '.join(header)!r} does not match the "
            f"{schema} schema {', '.join(columns)!r}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise RenderError(
                    f"{path}:{lineno}: expected {len(columns)} cells, "
                    f"got {len(row)}")
            rows.append(dict(zip(columns, row)))
    return rows
