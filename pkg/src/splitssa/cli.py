"""Command-line interface.

Subcommands::

    splitssa simulate        --model m.json --t-end 100 --seed 1 --out run.csv
    splitssa simulate-split  --model m.json --split 0 --h 0.5 --method lie \
                             --t-end 100 --seed 1 --out run.csv
    splitssa converge        --model m.json --h-list 1,0.5,0.25 --t-eval 100 \
                             --n-samples 1000 --seed 1 --out conv.csv
    splitssa spatial-demo    --cells 4 --diffusion 1.0 --t-end 50 --seed 1 --out demo.csv
    splitssa paper-experiments bd --out-dir data [--quick]
    splitssa dump-paths      --model m.json --seed 1 --trajectory 0 --n 32 --out paths.csv

Models are JSON files (see :mod:`splitssa.modelio` for the schema); the
four bundled models can be referenced by name (``bd``, ``dim``, ``bimol``,
``illposed``) instead of a path.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .csvio import write_table
from .experiments import (
    run_bimolecular,
    run_birth_death,
    run_dimerization,
    run_illposed,
)
from .kernel import KernelSpec
from .modelio import ModelDocument, bundled_model, load_model_file
from .network import SplitPartition
from .paths import StreamSeedPlan, dump_arrivals
from .exact import simulate_exact
from .spatial import flatten, line_mesh, reaction_diffusion_partition
from .splitstep import simulate_split
from .stats import coupled_study, error_vs_time_study
from .trajectory import states_on_grid

_BUNDLED_ALIASES = {
    "bd": "birth_death",
    "dim": "dimerization",
    "bimol": "bimolecular",
    "illposed": "illposed",
}


def _load(model_arg: str) -> ModelDocument:
    if model_arg in _BUNDLED_ALIASES:
        return bundled_model(_BUNDLED_ALIASES[model_arg])
    return load_model_file(model_arg)


def _resolve_x0(doc: ModelDocument, x0_arg: str | None) -> np.ndarray:
    if x0_arg is not None:
        return np.array([int(v) for v in x0_arg.split(",")], dtype=np.int64)
    if doc.initial_state is None:
        raise SystemExit("model file has no initial_state; pass --x0")
    return doc.initial_state


def _resolve_split(doc: ModelDocument, split_arg: str | None) -> SplitPartition:
    if split_arg is not None:
        r1 = tuple(int(v) for v in split_arg.split(",") if v != "")
        r2 = tuple(r for r in range(doc.network.channel_count) if r not in r1)
        part = SplitPartition(set_one=r1, set_two=r2)
    elif doc.split is not None:
        part = doc.split
    else:
        raise SystemExit("model file has no split section; pass --split")
    part.validate(doc.network.channel_count)
    return part


def _warn_off_grid(t: float, h: float, what: str) -> None:
    ratio = t / h
    if abs(ratio - round(ratio)) > 1e-9:
        print(
            f"warning: {what}={t} is not a multiple of h={h}; "
            "split-step output is most accurate on the step grid",
            file=sys.stderr,
        )


def _write_trajectory(out, traj, doc, md):
    names = doc.network.species_names or tuple(
        f"x{i}" for i in range(doc.network.species_count)
    )
    header = ["time", "channel", *names]
    rows = [(0.0, -1, *traj.initial_state.tolist())]
    states = states_on_grid(traj, doc.network, traj.times) if traj.event_count else None
    for k in range(traj.event_count):
        rows.append((float(traj.times[k]), int(traj.channels[k]), *states[k].tolist()))
    write_table(out, md, header, rows)


def _cmd_simulate(args) -> None:
    doc = _load(args.model)
    x0 = _resolve_x0(doc, args.x0)
    plan = StreamSeedPlan(args.seed, doc.network.channel_count)
    traj = simulate_exact(
        doc.network, x0, args.t_end, plan.paths_for(args.trajectory), engine=args.engine
    )
    md = {
        "command": "simulate", "model": doc.name or args.model, "seed": args.seed,
        "trajectory": args.trajectory, "t_end": args.t_end, "version": __version__,
    }
    _write_trajectory(args.out, traj, doc, md)
    print(f"wrote {traj.event_count} events to {args.out}")


def _cmd_simulate_split(args) -> None:
    doc = _load(args.model)
    x0 = _resolve_x0(doc, args.x0)
    part = _resolve_split(doc, args.split)
    spec = KernelSpec.lie(args.h) if args.method == "lie" else KernelSpec.strang(args.h)
    _warn_off_grid(args.t_end, args.h, "t-end")
    plan = StreamSeedPlan(args.seed, doc.network.channel_count)
    traj = simulate_split(
        doc.network, part, spec, x0, args.t_end, plan.paths_for(args.trajectory),
        engine=args.engine,
    )
    md = {
        "command": "simulate-split", "model": doc.name or args.model, "seed": args.seed,
        "trajectory": args.trajectory, "t_end": args.t_end, "h": args.h,
        "method": args.method, "set_one": ",".join(map(str, part.set_one)),
        "version": __version__,
    }
    _write_trajectory(args.out, traj, doc, md)
    print(f"wrote {traj.event_count} events to {args.out}")


def _cmd_converge(args) -> None:
    doc = _load(args.model)
    x0 = _resolve_x0(doc, args.x0)
    part = _resolve_split(doc, args.split)
    hs = [float(v) for v in args.h_list.split(",")]
    plan = StreamSeedPlan(args.seed, doc.network.channel_count)
    md = {
        "command": "converge", "model": doc.name or args.model, "seed": args.seed,
        "method": args.method, "n_samples": args.n_samples,
        "stop_cap": args.stop_cap, "version": __version__,
    }
    if args.t_grid:
        grid = [float(v) for v in args.t_grid.split(",")]
        res = error_vs_time_study(
            doc.network, part, x0, grid, args.n_samples, plan,
            h_values=hs, method=args.method, engine=args.engine,
        )
        rows = []
        for j, h in enumerate(hs):
            for t, e in zip(res.t_grid, res.estimates[j]):
                rows.append((h, t, e.mean, e.spread, e.count, e.half_width))
        write_table(args.out, md | {"mode": "timewise"},
                    ["h", "t", "M", "S", "N", "half_width"], rows)
    else:
        for h in hs:
            _warn_off_grid(args.t_eval, h, "t-eval")
        res = coupled_study(
            doc.network, part, x0, args.t_eval, args.n_samples, plan,
            h_values=hs, methods=(args.method,), stop_cap=args.stop_cap,
            engine=args.engine, n_jobs=args.jobs,
        )
        table = res.strong[args.method]
        rows = [
            (h, e.mean, e.spread, e.count, e.half_width)
            for h, e in zip(table.h_values, table.estimates)
        ]
        write_table(args.out, md | {"mode": "strong", "t_eval": args.t_eval},
                    ["h", "M", "S", "N", "half_width"], rows)
        print(f"fitted mean-square slope {table.fit_order():.3f} "
              f"(strong order {table.strong_order():.3f})")
    print(f"wrote {args.out}")


def _cmd_spatial_demo(args) -> None:
    doc = _load(args.model) if args.model else bundled_model("birth_death")
    mesh = doc.mesh or line_mesh(args.cells, args.diffusion)
    model = flatten(doc.network, mesh)
    part = reaction_diffusion_partition(model)
    x0 = np.zeros(model.flattened.species_count, dtype=np.int64)
    base_x0 = doc.initial_state if doc.initial_state is not None else np.zeros(
        doc.network.species_count, dtype=np.int64
    )
    x0[: doc.network.species_count] = base_x0  # everything starts in cell 0
    plan = StreamSeedPlan(args.seed, model.flattened.channel_count)
    traj_exact = simulate_exact(model.flattened, x0, args.t_end, plan.paths_for(0), engine=args.engine)
    spec = KernelSpec.lie(args.h)
    traj_split = simulate_split(
        model.flattened, part, spec, x0, args.t_end, plan.paths_for(0), engine=args.engine
    )
    grid = np.linspace(0.0, args.t_end, 26)
    ex = states_on_grid(traj_exact, model.flattened, grid)
    sp = states_on_grid(traj_split, model.flattened, grid)
    names = model.flattened.species_names
    header = ["t"] + [f"exact:{n}" for n in names] + [f"split:{n}" for n in names]
    rows = [(float(t), *ex[k].tolist(), *sp[k].tolist()) for k, t in enumerate(grid)]
    md = {
        "command": "spatial-demo", "cells": mesh.cell_count, "seed": args.seed,
        "h": args.h, "t_end": args.t_end,
        "reaction_channels": len(model.reaction_channels),
        "diffusion_channels": len(model.diffusion_channels), "version": __version__,
    }
    write_table(args.out, md, header, rows)
    total0 = int(x0.sum())
    print(
        f"{mesh.cell_count} cells, {model.flattened.channel_count} channels "
        f"({len(model.reaction_channels)} reaction + {len(model.diffusion_channels)} hop); "
        f"started with {total0} molecules in cell 0; wrote {args.out}"
    )


def _cmd_paper_experiments(args) -> None:
    runners = {
        "bd": run_birth_death,
        "dim": run_dimerization,
        "bimol": run_bimolecular,
        "illposed": run_illposed,
    }
    out = runners[args.which](
        args.out_dir, quick=args.quick, engine=args.engine, n_jobs=args.jobs
    )
    files = [v for v in out.values() if isinstance(v, str)]
    print("wrote:")
    for f in files:
        print(f"  {f}")


def _cmd_dump_paths(args) -> None:
    doc = _load(args.model)
    plan = StreamSeedPlan(args.seed, doc.network.channel_count)
    dump_arrivals(plan, args.trajectory, args.n, args.out)
    print(f"wrote first {args.n} arrivals x {doc.network.channel_count} channels to {args.out}")


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="splitssa", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--model", required=True, help="model JSON file or bundled name")
        p.add_argument("--x0", help="override initial state, comma-separated counts")
        p.add_argument("--engine", default="auto", choices=["auto", "python", "numba"])
        if seed:
            p.add_argument("--seed", type=int, required=True, help="ensemble seed")

    p = sub.add_parser("simulate", help="one exact trajectory to CSV")
    common(p)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--trajectory", type=int, default=0, help="trajectory id within the ensemble")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("simulate-split", help="one split-step trajectory to CSV")
    common(p)
    p.add_argument("--split", help="comma-separated channel indices of group one (0-based)")
    p.add_argument("--h", type=float, required=True, help="split-step length")
    p.add_argument("--method", choices=["lie", "strang"], default="lie")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--trajectory", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_split)

    p = sub.add_parser("converge", help="coupled convergence study to CSV")
    common(p)
    p.add_argument("--split", help="comma-separated channel indices of group one (0-based)")
    p.add_argument("--method", choices=["lie", "strang"], default="lie")
    p.add_argument("--h-list", required=True, help="comma-separated step sizes")
    p.add_argument("--t-eval", type=float, default=None)
    p.add_argument("--t-grid", help="comma-separated times for error-vs-time mode")
    p.add_argument("--n-samples", type=int, required=True)
    p.add_argument("--stop-cap", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("spatial-demo", help="flattened reaction-diffusion demo run")
    p.add_argument("--model", default=None, help="base model (default: bundled birth-death)")
    p.add_argument("--cells", type=int, default=4)
    p.add_argument("--diffusion", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.5)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--engine", default="auto", choices=["auto", "python", "numba"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spatial_demo)

    p = sub.add_parser("paper-experiments", help="write the bundled convergence datasets")
    p.add_argument("which", choices=["bd", "dim", "bimol", "illposed"])
    p.add_argument("--out-dir", default="data")
    p.add_argument("--quick", action="store_true", help="reduced sample counts")
    p.add_argument("--engine", default="auto", choices=["auto", "python", "numba"])
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=_cmd_paper_experiments)

    p = sub.add_parser("dump-paths", help="dump raw Poisson arrivals for debugging")
    common(p)
    p.add_argument("--trajectory", type=int, default=0)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dump_paths)

    args = parser.parse_args(argv)
    if args.command == "converge" and not args.t_grid and args.t_eval is None:
        parser.error("converge needs --t-eval (or --t-grid for error-vs-time mode)")
    args.func(args)


if __name__ == "__main__":
    main()
