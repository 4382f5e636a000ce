"""CSV files with a commented metadata header.

Every file this package writes starts with ``# key=value`` lines (seed,
model, parameters, package version) followed by a regular CSV header and
data rows; readers that ignore ``#`` comments parse them as plain CSV.
"""

from __future__ import annotations

import csv
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = ["write_table", "read_table"]


def write_table(
    path,
    metadata: Mapping[str, object],
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> None:
    with open(path, "w", newline="") as fh:
        for key, value in metadata.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def read_table(path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Read back a metadata CSV: (metadata, column names, float data)."""
    metadata: dict[str, str] = {}
    header: list[str] = []
    data: list[list[float]] = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            cells = next(csv.reader([line]))
            if not header:
                header = cells
            else:
                data.append([float(c) for c in cells])
    return metadata, header, np.array(data)
