#!/usr/bin/env python3
"""Mean-square error against time, one curve per split-step h.

Each input CSV holds one step size's (t, M, S, N, half_width) table with the
h value recorded in its metadata header; curves are drawn on log axes and
labelled by h, largest on top.

Usage:
    plot_error_vs_time.py --in bimol_timewise_h*.csv --out fig.png
"""

from __future__ import annotations

import argparse

import matplotlib.pyplot as plt
import numpy as np

from plotlib import DataError, apply_style, load_style, read_table, save_deterministic


def build_figure(paths: list[str], style: dict):
    apply_style(style)
    colors = style.get("series_colors", ["#1f3b70"])
    markers = style.get("series_markers", ["o"])
    series = []
    for path in paths:
        table = read_table(path)
        if "h" not in table.metadata:
            raise DataError(f"{path}: missing 'h' metadata entry")
        h = float(table.metadata["h"])
        series.append((h, table.column("t"), table.column("M")))
    series.sort(key=lambda s: -s[0])
    fig, ax = plt.subplots()
    for i, (h, t, m) in enumerate(series):
        ax.loglog(
            t, m,
            marker=markers[i % len(markers)], markersize=3,
            color=colors[i % len(colors)], label=f"h = {h:g}",
        )
    ax.set_xlabel("time t")
    ax.set_ylabel("mean-square error")
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    return fig


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--in", dest="inputs", nargs="+", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--style", default=None)
    args = parser.parse_args(argv)
    fig = build_figure(args.inputs, load_style(args.style))
    save_deterministic(fig, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
