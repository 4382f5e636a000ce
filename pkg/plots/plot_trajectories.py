#!/usr/bin/env python3
"""Sample-path figure: exact trajectory with split-step companions.

Consumes the ``*_samples.csv`` tables (t plus one column per run, all runs
coupled through shared noise) and draws them as step functions.

Usage:
    plot_trajectories.py --in bd_samples.csv --out fig.png
"""

from __future__ import annotations

import argparse

import matplotlib.pyplot as plt

from plotlib import apply_style, load_style, read_table, save_deterministic

_STYLES = ["-", "--", "-."]


def build_figure(path: str, style: dict):
    apply_style(style)
    colors = style.get("series_colors", ["#1f3b70"])
    table = read_table(path)
    t = table.column("t")
    fig, ax = plt.subplots()
    for i, name in enumerate(c for c in table.columns if c != "t"):
        ax.step(
            t, table.column(name), where="post",
            linestyle=_STYLES[i % len(_STYLES)], color=colors[i % len(colors)],
            label=name,
        )
    ax.set_xlabel("time t")
    ax.set_ylabel("copy number")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    return fig


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--in", dest="input", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--style", default=None)
    args = parser.parse_args(argv)
    fig = build_figure(args.input, load_style(args.style))
    save_deterministic(fig, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
