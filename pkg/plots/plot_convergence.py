#!/usr/bin/env python3
"""Log-log convergence figure from one or more (h, M, S, N) tables.

Strong tables plot the mean-square column M against h with the +-S/sqrt(N)
uncertainty band; weak tables plot |estimate|, dropping rows flagged
sign-indeterminate.  Reference slopes for orders 1/2 and 1 are drawn, and
the fitted slope of each series is annotated in the legend (for a single
data row the series is drawn as a point and no slope is fitted).

Usage:
    plot_convergence.py --in bd_strong_lie.csv [dim_strong_lie.csv ...] \
        --kind strong --out fig.png [--style style.json]
"""

from __future__ import annotations

import argparse
import os

import matplotlib.pyplot as plt
import numpy as np

from plotlib import (
    DataError,
    apply_style,
    fitted_slope,
    load_style,
    read_table,
    reference_line,
    save_deterministic,
)


def series_from_table(table, kind: str):
    h = table.column("h")
    if kind == "strong":
        value = table.column("M")
        band = table.column("half_width")
    else:
        value = table.column("estimate")
        band = table.column("half_width")
        keep = table.column("sign_indeterminate") == 0.0
        h, value, band = h[keep], np.abs(value[keep]), band[keep]
    if h.size == 0:
        raise DataError("no plottable rows (all sign-indeterminate?)")
    order = np.argsort(h)
    return h[order], value[order], band[order]


def label_for(table, path: str) -> str:
    md = table.metadata
    bits = [md.get("model") or os.path.basename(path)]
    if "method" in md:
        bits.append(md["method"])
    if "observable" in md:
        bits.append(md["observable"].replace("_", " "))
    return ", ".join(bits)


def build_figure(paths: list[str], kind: str, style: dict):
    apply_style(style)
    colors = style.get("series_colors", ["#1f3b70"])
    markers = style.get("series_markers", ["o"])
    fig, ax = plt.subplots()
    all_h, anchor = [], None
    for i, path in enumerate(paths):
        table = read_table(path)
        h, value, band = series_from_table(table, kind)
        color = colors[i % len(colors)]
        marker = markers[i % len(markers)]
        label = label_for(table, path)
        if h.size >= 2:
            label += f" (slope {fitted_slope(h, value):.2f})"
            ax.loglog(h, value, marker=marker, color=color, label=label)
            ax.loglog(h, value + band, ":", color=color, linewidth=0.8)
            ax.loglog(h, np.maximum(value - band, 1e-300), ":", color=color, linewidth=0.8)
        else:
            ax.loglog(h, value, marker=marker, color=color, linestyle="none", label=label)
        all_h.extend(h.tolist())
        anchor = value[-1] if anchor is None else anchor
    hs = np.array(sorted(set(all_h)))
    if hs.size >= 2:
        reference_line(ax, hs, anchor * 0.5, 0.5, "slope 1/2")
        reference_line(ax, hs, anchor * 0.25, 1.0, "slope 1")
    ax.set_xlabel("split-step h")
    ax.set_ylabel("mean-square error" if kind == "strong" else "|weak error|")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    return fig


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--in", dest="inputs", nargs="+", required=True)
    parser.add_argument("--kind", choices=["strong", "weak"], default="strong")
    parser.add_argument("--out", required=True)
    parser.add_argument("--style", default=None)
    args = parser.parse_args(argv)
    fig = build_figure(args.inputs, args.kind, load_style(args.style))
    save_deterministic(fig, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
