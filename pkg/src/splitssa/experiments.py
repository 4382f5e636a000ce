"""Reproduction runs for the four study models, written out as CSV data.

Each ``run_*`` function loads the corresponding bundled model, performs the
coupled error studies with fixed default seeds, and writes CSV files with a
metadata header into the requested directory.  Everything is reproducible
bit-exactly from (parameters, seed); ``quick=True`` shrinks sample counts
for smoke runs.

A note on the bimolecular model: unlike the other three systems it has no
canonical rate constants, so the defaults here (``k1 = 5``, ``k2 = 0.005``)
are this package's own choice, sized so runs stay desk-scale, and results
for that model are checked as qualitative properties only.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .csvio import write_table
from .kernel import KernelSpec
from .modelio import bundled_model
from .paths import StreamSeedPlan
from .exact import simulate_exact
from .splitstep import simulate_split
from .stats import (
    ConvergenceTable,
    StudyResult,
    TimewiseResult,
    WeakErrorEstimate,
    coupled_study,
    error_vs_time_study,
)
from .trajectory import states_on_grid

__all__ = [
    "ExperimentSpec",
    "STRONG_H_VALUES",
    "WEAK_H_VALUES",
    "BIMOL_H_VALUES",
    "ILLPOSED_H_VALUES",
    "run_birth_death",
    "run_dimerization",
    "run_bimolecular",
    "run_illposed",
]

STRONG_H_VALUES = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625)
WEAK_H_VALUES = (1.0, 0.5, 0.25, 0.125)
BIMOL_H_VALUES = (4.0, 2.0, 1.0, 0.5, 0.25, 0.125)
#: Reciprocals of integers, log-spaced across [1e-4, 1e-2], so the final
#: time 1 is a multiple of every step.
ILLPOSED_H_VALUES = tuple(
    1.0 / n for n in (100, 193, 373, 719, 1389, 2683, 5179, 10000)
)

_SEEDS = {"bd": 20101, "dim": 20202, "bimol": 20303, "illposed": 20404}


@dataclass(frozen=True)
class ExperimentSpec:
    """Resolved configuration of one experiment run."""

    model: str
    h_values: tuple[float, ...]
    methods: tuple[str, ...]
    t_eval: float
    n_samples: int
    seed: int
    stop_cap: float | None = None
    t_grid: tuple[float, ...] | None = None

    def metadata(self) -> dict[str, object]:
        md: dict[str, object] = {
            "model": self.model,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "t_eval": self.t_eval,
            "methods": "+".join(self.methods),
            "h_values": " ".join(repr(h) for h in self.h_values),
            "version": __version__,
        }
        if self.stop_cap is not None:
            md["stop_cap"] = self.stop_cap
        return md


def _write_strong(path, table: ConvergenceTable, md: dict) -> None:
    rows = [
        (h, e.mean, e.spread, e.count, e.half_width)
        for h, e in zip(table.h_values, table.estimates)
    ]
    write_table(path, md, ["h", "M", "S", "N", "half_width"], rows)


def _write_weak(path, h_values, estimates: tuple[WeakErrorEstimate, ...], md: dict) -> None:
    rows = [
        (h, e.estimate, e.spread, e.count, e.half_width, int(e.sign_indeterminate))
        for h, e in zip(h_values, estimates)
    ]
    write_table(
        path, md, ["h", "estimate", "S", "N", "half_width", "sign_indeterminate"], rows
    )


def _auto_samples(run, n0: int, cap: int, target_rel: float = 0.1):
    """Grow the sample count until the largest-h estimate is tight enough."""
    n = n0
    while True:
        result = run(n)
        largest = result.strong[result_first_method(result)].estimates[0]
        if largest.mean <= 0 or largest.half_width <= target_rel * largest.mean or n >= cap:
            return result
        n = min(2 * n, cap)


def result_first_method(result: StudyResult) -> str:
    return next(iter(result.strong))


def _strong_weak_run(
    tag: str,
    out_dir,
    *,
    seed: int | None,
    quick: bool,
    engine: str,
    n_jobs: int | None,
    n_strong: int,
    n_weak: int,
) -> dict[str, object]:
    doc = bundled_model({"bd": "birth_death", "dim": "dimerization"}[tag])
    model_name = doc.name or tag
    net, split, x0 = doc.network, doc.split, doc.initial_state
    seed = _SEEDS[tag] if seed is None else seed
    if quick:
        n_strong, n_weak = max(n_strong // 25, 200), max(n_weak // 25, 200)
    t_eval = 100.0
    os.makedirs(out_dir, exist_ok=True)
    out: dict[str, object] = {}

    plan = StreamSeedPlan(seed, net.channel_count)
    strong_spec = ExperimentSpec(
        model=model_name, h_values=STRONG_H_VALUES, methods=("lie", "strang"),
        t_eval=t_eval, n_samples=n_strong, seed=seed,
    )
    strong = _auto_samples(
        lambda n: coupled_study(
            net, split, x0, t_eval, n, plan,
            h_values=STRONG_H_VALUES, methods=("lie", "strang"),
            engine=engine, n_jobs=n_jobs,
        ),
        n_strong,
        4 * n_strong,
    )
    for method in ("lie", "strang"):
        md = strong_spec.metadata() | {"kind": "strong", "method": method}
        p = os.path.join(out_dir, f"{tag}_strong_{method}.csv")
        _write_strong(p, strong.strong[method], md)
        out[f"strong_{method}"] = p

    weak_plan = StreamSeedPlan(seed + 1, net.channel_count)
    weak_spec = ExperimentSpec(
        model=model_name, h_values=WEAK_H_VALUES, methods=("lie",),
        t_eval=t_eval, n_samples=n_weak, seed=seed + 1,
    )
    weak = coupled_study(
        net, split, x0, t_eval, n_weak, weak_plan,
        h_values=WEAK_H_VALUES, methods=("lie",),
        observables=("first_factorial", "second_factorial"),
        engine=engine, n_jobs=n_jobs,
    )
    for obs in ("first_factorial", "second_factorial"):
        md = weak_spec.metadata() | {"kind": "weak", "observable": obs}
        p = os.path.join(out_dir, f"{tag}_weak_{obs}.csv")
        _write_weak(p, WEAK_H_VALUES, weak.weak[("lie", obs)], md)
        out[f"weak_{obs}"] = p

    # Sample paths for the trajectory figure: one exact run and two split
    # runs on the same noise, tabulated on a half-unit grid.
    grid = np.arange(0.0, t_eval + 0.25, 0.5)
    spaths = plan.paths_for(0)
    tr_exact = simulate_exact(net, x0, t_eval, spaths, engine=engine)
    tr_h2 = simulate_split(net, split, KernelSpec.lie(2.0), x0, t_eval, spaths, engine=engine)
    tr_h14 = simulate_split(net, split, KernelSpec.lie(0.25), x0, t_eval, spaths, engine=engine)
    cols = np.stack(
        [
            states_on_grid(tr_exact, net, grid)[:, 0],
            states_on_grid(tr_h2, net, grid)[:, 0],
            states_on_grid(tr_h14, net, grid)[:, 0],
        ],
        axis=1,
    )
    p = os.path.join(out_dir, f"{tag}_samples.csv")
    write_table(
        p,
        strong_spec.metadata() | {"kind": "samples", "trajectory": 0},
        ["t", "exact", "split_h2", "split_h0.25"],
        [(t, int(a), int(b), int(c)) for t, (a, b, c) in zip(grid, cols)],
    )
    out["samples"] = p
    out["strong_result"] = strong
    out["weak_result"] = weak
    return out


def run_birth_death(
    out_dir, *, seed: int | None = None, quick: bool = False,
    engine: str = "auto", n_jobs: int | None = None,
    n_strong: int = 10_000, n_weak: int = 40_000,
) -> dict[str, object]:
    """Strong (Lie+Strang) and weak (f1, f2) convergence data for birth-death."""
    return _strong_weak_run(
        "bd", out_dir, seed=seed, quick=quick, engine=engine, n_jobs=n_jobs,
        n_strong=n_strong, n_weak=n_weak,
    )


def run_dimerization(
    out_dir, *, seed: int | None = None, quick: bool = False,
    engine: str = "auto", n_jobs: int | None = None,
    n_strong: int = 10_000, n_weak: int = 40_000,
) -> dict[str, object]:
    """Same study as :func:`run_birth_death` for the quadratic-sink model."""
    return _strong_weak_run(
        "dim", out_dir, seed=seed, quick=quick, engine=engine, n_jobs=n_jobs,
        n_strong=n_strong, n_weak=n_weak,
    )


def run_bimolecular(
    out_dir, *, seed: int | None = None, quick: bool = False,
    engine: str = "auto", n_jobs: int | None = None, n_samples: int = 3000,
) -> dict[str, object]:
    """Mean-square error against time for the open two-species system.

    Writes one timewise CSV per step size, a summary of pairwise orders
    averaged over the late-time window [128, 256], and the difference
    process diagnostics (its mean stays at the initial value and its
    variance grows linearly at twice the birth rate).
    """
    doc = bundled_model("bimolecular")
    net, split, x0 = doc.network, doc.split, doc.initial_state
    seed = _SEEDS["bimol"] if seed is None else seed
    if quick:
        n_samples = max(n_samples // 10, 150)
    t_grid = tuple(float(t) for t in np.arange(8.0, 256.1, 8.0))
    spec = ExperimentSpec(
        model=doc.name or "bimolecular", h_values=BIMOL_H_VALUES, methods=("lie",),
        t_eval=256.0, n_samples=n_samples, seed=seed, t_grid=t_grid,
    )
    os.makedirs(out_dir, exist_ok=True)
    plan = StreamSeedPlan(seed, net.channel_count)
    res = error_vs_time_study(
        net, split, x0, t_grid, n_samples, plan,
        h_values=BIMOL_H_VALUES, method="lie", engine=engine,
    )
    out: dict[str, object] = {"timewise_result": res}
    for j, h in enumerate(BIMOL_H_VALUES):
        tagh = ("%g" % h).replace(".", "p")
        p = os.path.join(out_dir, f"bimol_timewise_h{tagh}.csv")
        rows = [
            (t, e.mean, e.spread, e.count, e.half_width)
            for t, e in zip(res.t_grid, res.estimates[j])
        ]
        write_table(
            p, spec.metadata() | {"kind": "timewise", "h": repr(h)},
            ["t", "M", "S", "N", "half_width"], rows,
        )
        out[f"timewise_h{tagh}"] = p

    orders = pairwise_orders_late_window(res)
    p = os.path.join(out_dir, "bimol_orders.csv")
    write_table(
        p, spec.metadata() | {"kind": "orders", "window": "128..256"},
        ["h_coarse", "h_fine", "strong_order"],
        [(hc, hf, q) for (hc, hf, q) in orders],
    )
    out["orders"] = p

    # Difference-process law, from exact runs on the same sample ids.
    k1 = 5.0
    t_checks = np.array([64.0, 256.0])
    us = np.empty((n_samples, t_checks.size))
    for i in range(n_samples):
        paths = plan.paths_for(i)
        tr = simulate_exact(net, x0, float(t_checks[-1]), paths, engine=engine)
        s = states_on_grid(tr, net, t_checks)
        us[i, :] = s[:, 0] - s[:, 1]
    rows = []
    for col, t_check in enumerate(t_checks):
        u = us[:, col]
        var_u = u.var(ddof=1)
        se_mean = u.std(ddof=1) / np.sqrt(n_samples)
        se_var = var_u * np.sqrt(2.0 / (n_samples - 1))
        rows.append((float(t_check), u.mean(), se_mean, var_u, se_var, 2 * k1 * float(t_check)))
    p = os.path.join(out_dir, "bimol_diffproc.csv")
    write_table(
        p, spec.metadata() | {"kind": "diffproc"},
        ["t", "mean_U", "se_mean", "var_U", "se_var", "var_expected"], rows,
    )
    out["diffproc"] = p
    return out


def pairwise_orders_late_window(
    res: TimewiseResult, window: tuple[float, float] = (128.0, 256.0)
) -> list[tuple[float, float, float]]:
    """Strong orders between consecutive step sizes, averaged over a window.

    For each pair of consecutive h and each grid time in the window the
    two-point slope of log M against log h is halved (RMS order) and then
    averaged over the window.
    """
    lo, hi = window
    keep = [k for k, t in enumerate(res.t_grid) if lo <= t <= hi]
    if not keep:
        raise ValueError("no grid times inside the averaging window")
    out = []
    hs = res.h_values
    for j in range(len(hs) - 1):
        qs = []
        for k in keep:
            m_hi = res.estimates[j][k].mean
            m_lo = res.estimates[j + 1][k].mean
            qs.append(0.5 * np.log(m_hi / m_lo) / np.log(hs[j] / hs[j + 1]))
        out.append((hs[j], hs[j + 1], float(np.mean(qs))))
    return out


def run_illposed(
    out_dir, *, seed: int | None = None, quick: bool = False,
    engine: str = "auto", n_jobs: int | None = None, n_samples: int = 4000,
) -> dict[str, object]:
    """Small-h convergence sweep for the split with one ill-behaved group.

    The dynamics is simulated as a stopped process: each trajectory freezes
    the first time its count exceeds the cap 1000.  Step sizes are
    reciprocals of integers so the final time lies on every grid.
    """
    doc = bundled_model("illposed")
    net, split, x0 = doc.network, doc.split, doc.initial_state
    seed = _SEEDS["illposed"] if seed is None else seed
    if quick:
        n_samples = max(n_samples // 10, 200)
    t_eval = 1.0
    cap = 1000.0
    spec = ExperimentSpec(
        model=doc.name or "illposed", h_values=ILLPOSED_H_VALUES, methods=("lie",),
        t_eval=t_eval, n_samples=n_samples, seed=seed, stop_cap=cap,
    )
    os.makedirs(out_dir, exist_ok=True)
    plan = StreamSeedPlan(seed, net.channel_count)
    res = coupled_study(
        net, split, x0, t_eval, n_samples, plan,
        h_values=ILLPOSED_H_VALUES, methods=("lie",),
        stop_cap=cap, engine=engine, n_jobs=n_jobs,
    )
    p = os.path.join(out_dir, "illposed_strong.csv")
    _write_strong(p, res.strong["lie"], spec.metadata() | {"kind": "strong", "method": "lie"})
    return {"strong": p, "strong_result": res}
