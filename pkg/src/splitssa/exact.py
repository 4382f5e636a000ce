"""Exact path-wise simulation in operational time.

The exact simulator realizes the random time change construction directly:
channel ``r`` fires whenever its operational clock ``T_r(t)``, advanced at
slope ``w_r(X_t)`` between events, reaches the next arrival of the
channel's unit-rate Poisson path.  Given the network, the initial state and
the paths, the trajectory is a deterministic object: replaying the same
inputs reproduces it bit-exactly, and two simulators sharing the same path
objects are coupled through them.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _fastloop, engine
from .engine import DEFAULT_EVENT_BUDGET, EventBudgetExceeded, compile_network
from .kernel import KernelSpec
from .network import ReactionNetwork, WeightVector, as_state
from .paths import PoissonPath
from .trajectory import Trajectory, state_at, states_on_grid  # noqa: F401  (re-export)

__all__ = ["simulate_exact", "state_at", "states_on_grid", "EventBudgetExceeded"]


def _run(
    network: ReactionNetwork,
    x0,
    t_end: float,
    paths: Sequence[PoissonPath],
    *,
    partition=None,
    spec: KernelSpec | None = None,
    max_events: int = DEFAULT_EVENT_BUDGET,
    stop_cap: float | None = None,
    stop_weights: WeightVector | None = None,
    engine_mode: str = "auto",
) -> Trajectory:
    x0 = as_state(x0, network.species_count)
    if not (t_end > 0 and np.isfinite(t_end)):
        raise ValueError(f"t_end must be positive and finite, got {t_end}")
    if len(paths) != network.channel_count:
        raise ValueError(
            f"need {network.channel_count} Poisson paths, got {len(paths)}"
        )
    compiled = compile_network(network)
    group = partition.group_of(network.channel_count) if partition is not None else None

    if engine_mode not in ("auto", "python", "numba"):
        raise ValueError(f"unknown engine {engine_mode!r}")
    use_fast = (
        engine_mode != "python"
        and compiled.all_mass_action
        and _fastloop.HAVE_NUMBA
    )
    if engine_mode == "numba" and not use_fast:
        raise ValueError("numba engine requires an all-mass-action network and numba installed")

    if use_fast:
        times, channels, x, T, idx, stopped, stop_time, budget_hit = _fastloop.run_fast(
            compiled,
            x0,
            t_end,
            paths,
            group=group,
            spec=spec,
            max_events=max_events,
            stop_cap=stop_cap,
            stop_weights=stop_weights,
        )
        if budget_hit:
            traj = Trajectory(
                initial_state=x0.copy(),
                times=times,
                channels=channels,
                final_time=float(times[-1]) if times.size else 0.0,
                final_state=x,
            )
            raise EventBudgetExceeded(
                f"event budget {max_events} exhausted before t_end={t_end}", traj
            )
        return Trajectory(
            initial_state=x0.copy(),
            times=times,
            channels=channels,
            final_time=float(t_end),
            final_state=x,
            stopped=stopped,
            stop_time=stop_time,
        )

    raw = engine.run_reference(
        compiled,
        x0,
        t_end,
        paths,
        group=group,
        spec=spec,
        max_events=max_events,
        stop_cap=stop_cap,
        stop_weights=stop_weights,
    )
    return Trajectory(
        initial_state=x0.copy(),
        times=raw.times,
        channels=raw.channels,
        final_time=float(t_end),
        final_state=raw.final_state,
        stopped=raw.stopped,
        stop_time=raw.stop_time,
    )


def simulate_exact(
    network: ReactionNetwork,
    x0,
    t_end: float,
    paths: Sequence[PoissonPath],
    *,
    max_events: int = DEFAULT_EVENT_BUDGET,
    stop_cap: float | None = None,
    stop_weights: WeightVector | None = None,
    engine: str = "auto",
) -> Trajectory:
    """Simulate the exact dynamics on ``[0, t_end]`` with the given paths.

    Parameters
    ----------
    network, x0
        The reaction network and a non-negative integer initial state.
    t_end
        Final time; the returned trajectory covers ``[0, t_end]``.
    paths
        One :class:`~splitssa.paths.PoissonPath` per channel.  Passing the
        same objects to another simulator couples the two runs.
    max_events
        Budget guarding runaway systems; raises
        :class:`~splitssa.engine.EventBudgetExceeded` (carrying the
        truncated trajectory) when exhausted.
    stop_cap, stop_weights
        When ``stop_cap`` is given, the run freezes at the first time the
        weighted norm of the state exceeds the cap (stopped process); the
        state is held constant up to ``t_end``.
    engine
        ``"auto"`` (compiled fast path when available), ``"python"``
        (reference loop) or ``"numba"``.
    """
    return _run(
        network,
        x0,
        t_end,
        paths,
        max_events=max_events,
        stop_cap=stop_cap,
        stop_weights=stop_weights,
        engine_mode=engine,
    )
