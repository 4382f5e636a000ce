"""Shared helpers for the figure scripts.

These scripts are deliberately decoupled from the simulation library: they
read only its CSV outputs (``# key=value`` metadata lines followed by a
regular CSV table) and a pinned style file, and they render with a reset
matplotlib configuration so the output bytes depend on nothing ambient.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DEFAULT_STYLE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "style.json")


class DataError(ValueError):
    """Malformed or incomplete input CSV."""


@dataclass
class Table:
    metadata: dict
    columns: list
    data: np.ndarray

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(
                f"missing column {name!r}; file has {self.columns}"
            )
        return self.data[:, self.columns.index(name)]


def read_table(path) -> Table:
    metadata, columns, rows = {}, [], []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, value = body.partition("=")
                if value:
                    metadata[key.strip()] = value.strip()
                continue
            cells = next(csv.reader([line]))
            if not columns:
                columns = cells
            else:
                rows.append([float(c) for c in cells])
    if not columns:
        raise DataError(f"{path}: no header row found")
    return Table(metadata=metadata, columns=columns, data=np.array(rows))


def load_style(path=None) -> dict:
    with open(path or DEFAULT_STYLE) as fh:
        return json.load(fh)


def apply_style(style: dict) -> None:
    matplotlib.rcdefaults()
    matplotlib.rcParams.update(
        {
            "figure.figsize": style.get("figsize", [5.0, 3.8]),
            "figure.dpi": style.get("dpi", 120),
            "savefig.dpi": style.get("dpi", 120),
            "font.size": style.get("font_size", 9),
            "axes.grid": True,
            "grid.alpha": 0.3,
            "lines.linewidth": style.get("linewidth", 1.2),
            "svg.hashsalt": style.get("svg_hashsalt", "splitssa-plots"),
        }
    )


def save_deterministic(fig, out_path: str) -> None:
    """Write the figure without any timestamp so reruns are byte-identical."""
    fmt = os.path.splitext(out_path)[1].lstrip(".").lower() or "png"
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(out_path, format=fmt, metadata=metadata)
    plt.close(fig)


def fitted_slope(h: np.ndarray, values: np.ndarray) -> float:
    return float(np.polyfit(np.log(h), np.log(values), 1)[0])


def reference_line(ax, h: np.ndarray, anchor: float, slope: float, label: str) -> None:
    h = np.sort(np.asarray(h))
    ref = anchor * (h / h.max()) ** slope
    ax.loglog(h, ref, "--", color="0.55", linewidth=0.9)
    ax.annotate(label, (h[0], ref[0]), textcoords="offset points",
                xytext=(4, -2), fontsize=7, color="0.4")
