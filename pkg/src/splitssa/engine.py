"""Shared event-driven core for the exact and split-step simulators.

Both simulators advance, per channel, an *internal* (operational) clock
``T_r(t) = integral of the channel's effective intensity up to t`` and
consume the channel's Poisson arrivals in order: channel ``r`` fires when
``T_r`` reaches the next unconsumed arrival.  Between events every
effective intensity is constant, so internal clocks advance by exact
piecewise-linear integration; there is no time-discretization error
anywhere in this loop.

The split-step simulator is the same loop with two additions: effective
intensities carry the square-wave factor (2 or 0, by channel group), and
deterministic switch events flip the factors every half-step without
touching the state.

When a channel's effective intensity hits zero the channel is *frozen*: its
internal clock simply stops, and the pending arrival is kept.  For the
external-time view the clock records the putative firing time and the rate
in force just before freezing; while frozen that putative time slides along
with current time, so reactivation at rate ``w_new`` is the pure rescaling

    tau_new = t + (tau_old - t) * w_old / w_new

which consumes no randomness and preserves the operational time already
accumulated.  The loop itself never needs the rescaled value (it recomputes
delays from the internal clocks), but the bookkeeping is maintained so the
two views can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernel import KernelSpec
from .network import Custom, MassAction, ReactionNetwork, WeightVector
from .paths import PoissonPath
from .trajectory import Trajectory

__all__ = [
    "ChannelClock",
    "FrozenState",
    "reactivate_channel",
    "CompiledNetwork",
    "compile_network",
    "EventBudgetExceeded",
    "run_reference",
    "DEFAULT_EVENT_BUDGET",
]

DEFAULT_EVENT_BUDGET = 10**8

_INF = float("inf")


@dataclass
class FrozenState:
    """Putative firing time and rate recorded when a channel's rate vanished."""

    tau_old: float
    w_old: float


@dataclass
class ChannelClock:
    """Operational-time bookkeeping for one reaction channel.

    ``internal_time`` is the operational time consumed so far and
    ``next_internal_arrival`` the pending arrival of the channel's Poisson
    path; the channel fires when the former reaches the latter.
    """

    internal_time: float = 0.0
    next_internal_arrival: float = _INF
    frozen_state: FrozenState | None = None

    def freeze(self, t_now: float, w_old: float) -> None:
        """Record the external putative firing time as the rate drops to zero.

        Replaces any previously recorded pair: only the most recent freeze
        matters for the next reactivation.
        """
        if w_old <= 0.0:
            raise ValueError("freeze requires the pre-freeze rate to be positive")
        tau_old = t_now + (self.next_internal_arrival - self.internal_time) / w_old
        self.frozen_state = FrozenState(tau_old=tau_old, w_old=w_old)

    def slide(self, dt: float) -> None:
        """Keep the frozen putative time current while external time advances."""
        if self.frozen_state is not None:
            self.frozen_state.tau_old += dt


def reactivate_channel(clock: ChannelClock, t_current: float, w_new: float) -> float:
    """Rescale a frozen channel's putative firing time to the new rate.

    Returns the new external next-firing time

        tau_new = t_current + (tau_old - t_current) * w_old / w_new

    and clears the frozen record.  No random number is consumed: the
    channel's pending Poisson arrival is untouched, only the external-time
    view of it changes with the rate.
    """
    if w_new <= 0.0:
        raise ValueError("reactivation rate must be positive")
    fs = clock.frozen_state
    if fs is None:
        raise ValueError("reactivate_channel called on a non-frozen clock")
    tau_new = t_current + (fs.tau_old - t_current) * fs.w_old / w_new
    clock.frozen_state = None
    return tau_new


class EventBudgetExceeded(RuntimeError):
    """Event budget hit before ``t_end``; carries the truncated trajectory."""

    def __init__(self, message: str, trajectory: Trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def _mass_action_evaluator(rate: float, mult: tuple[int, ...]) -> Callable:
    active = [(i, m) for i, m in enumerate(mult) if m > 0]
    if not active:
        return lambda x, _c=rate: _c
    if len(active) == 1:
        i, m = active[0]
        if m == 1:
            return lambda x, _c=rate, _i=i: _c * x[_i]
        if m == 2:
            return lambda x, _c=rate, _i=i: _c * x[_i] * (x[_i] - 1)
        if m == 3:
            return lambda x, _c=rate, _i=i: _c * x[_i] * (x[_i] - 1) * (x[_i] - 2)
    if len(active) == 2 and active[0][1] == 1 and active[1][1] == 1:
        i, _ = active[0]
        j, _ = active[1]
        return lambda x, _c=rate, _i=i, _j=j: _c * x[_i] * x[_j]

    def general(x, _c=rate, _active=tuple(active)):
        w = _c
        for i, m in _active:
            xi = x[i]
            for k in range(m):
                w *= xi - k
            if w == 0.0:
                return 0.0
        return w

    return general


def _clamped(evaluator: Callable, col: np.ndarray) -> Callable:
    col = col.copy()

    def clamped(x, _f=evaluator, _col=col):
        if np.all(x >= _col):
            return _f(x)
        return 0.0

    return clamped


@dataclass
class CompiledNetwork:
    """Per-run evaluation plan for a network: closures plus flat arrays."""

    network: ReactionNetwork
    evaluators: list[Callable]
    columns: list[np.ndarray]
    all_mass_action: bool
    ma_rate: np.ndarray
    ma_mult: np.ndarray
    needs_clamp: np.ndarray

    @property
    def channel_count(self) -> int:
        return self.network.channel_count

    @property
    def species_count(self) -> int:
        return self.network.species_count


def compile_network(network: ReactionNetwork) -> CompiledNetwork:
    """Build fast per-channel evaluators (clamped where necessary).

    A mass-action channel needs an explicit feasibility clamp only when its
    stoichiometry consumes more copies of some species than its reactant
    multiplicity counts; otherwise the falling factorial already vanishes on
    every infeasible state.  Custom channels are always clamped.
    """
    R = network.channel_count
    D = network.species_count
    evaluators: list[Callable] = []
    needs_clamp = np.zeros(R, dtype=np.uint8)
    ma_rate = np.zeros(R, dtype=np.float64)
    ma_mult = np.zeros((R, D), dtype=np.int64)
    all_ma = True
    for r in range(R):
        p = network.propensities[r]
        col = network.stoich[:, r]
        if isinstance(p, MassAction):
            ma_rate[r] = p.rate_constant
            ma_mult[r, :] = p.reactant_multiplicity
            clamp = bool(np.any(col > ma_mult[r, :]))
            needs_clamp[r] = clamp
            f = _mass_action_evaluator(p.rate_constant, p.reactant_multiplicity)
            evaluators.append(_clamped(f, col) if clamp else f)
        else:
            all_ma = False
            needs_clamp[r] = 1
            evaluators.append(_clamped(p, col))
    columns = [network.stoich[:, r].copy() for r in range(R)]
    return CompiledNetwork(
        network=network,
        evaluators=evaluators,
        columns=columns,
        all_mass_action=all_ma,
        ma_rate=ma_rate,
        ma_mult=ma_mult,
        needs_clamp=needs_clamp,
    )


@dataclass
class RawRun:
    times: np.ndarray
    channels: np.ndarray
    final_state: np.ndarray
    clocks: list[ChannelClock]
    consumed: np.ndarray
    stopped: bool
    stop_time: float | None


def run_reference(
    compiled: CompiledNetwork,
    x0: np.ndarray,
    t_end: float,
    paths: Sequence[PoissonPath],
    *,
    group: np.ndarray | None = None,
    spec: KernelSpec | None = None,
    max_events: int = DEFAULT_EVENT_BUDGET,
    stop_cap: float | None = None,
    stop_weights: WeightVector | None = None,
) -> RawRun:
    """Reference event loop (pure Python); see module docstring for semantics.

    ``spec is None`` runs the exact dynamics; otherwise channels in group 0
    are modulated by ``1 + sigma`` and group 1 by ``1 - sigma``.
    """
    R = compiled.channel_count
    D = compiled.species_count
    if len(paths) != R:
        raise ValueError(f"need one Poisson path per channel ({R}), got {len(paths)}")
    use_kernel = spec is not None
    if use_kernel:
        if group is None:
            raise ValueError("split run requires channel groups")
        half = spec.half_step
        phase = spec.phase
        sigma = 1
        m_sw = 1
    else:
        half = phase = 0.0
        sigma = 1
        m_sw = 0

    evaluators = compiled.evaluators
    columns = compiled.columns
    x = x0.astype(np.int64).copy()
    T = [0.0] * R
    P = [paths[r].arrival(0) for r in range(R)]
    idx = [0] * R
    clocks = [ChannelClock(internal_time=0.0, next_internal_arrival=P[r]) for r in range(R)]

    cap = -1.0 if stop_cap is None else float(stop_cap)
    w_stop = None
    if cap >= 0.0:
        w_stop = (stop_weights or WeightVector.ones(D)).weights
        if float(w_stop @ x) > cap:
            # already outside the cap: the stopped process never moves
            return RawRun(
                times=np.array([]),
                channels=np.array([], dtype=np.int32),
                final_state=x,
                clocks=clocks,
                consumed=np.array(idx, dtype=np.int64),
                stopped=True,
                stop_time=0.0,
            )

    def effective(r: int) -> float:
        w = evaluators[r](x)
        if use_kernel:
            if group[r] == 0:
                w *= 2.0 if sigma > 0 else 0.0
            else:
                w *= 0.0 if sigma > 0 else 2.0
        return w

    w_eff = [effective(r) for r in range(R)]

    times: list[float] = []
    fired: list[int] = []
    t = 0.0
    stopped = False
    stop_time: float | None = None

    def advance(dt: float) -> None:
        for r in range(R):
            w = w_eff[r]
            if w > 0.0:
                T[r] += w * dt
            else:
                clocks[r].slide(dt)

    def refresh_rates() -> None:
        # Detect rate transitions for the frozen-clock bookkeeping.
        for r in range(R):
            w_new = effective(r)
            w_old = w_eff[r]
            if w_old > 0.0 and w_new == 0.0:
                clocks[r].internal_time = T[r]
                clocks[r].next_internal_arrival = P[r]
                clocks[r].freeze(t, w_old)
            elif w_old == 0.0 and w_new > 0.0 and clocks[r].frozen_state is not None:
                reactivate_channel(clocks[r], t, w_new)
            w_eff[r] = w_new

    while True:
        best = _INF
        rb = -1
        for r in range(R):
            w = w_eff[r]
            if w > 0.0:
                d = (P[r] - T[r]) / w
                if d < best:
                    best = d
                    rb = r
        t_fire = t + best if rb >= 0 else _INF
        t_sw = m_sw * half - phase if use_kernel else _INF

        if t_sw <= t_fire:
            if t_sw >= t_end:
                advance(t_end - t)
                t = t_end
                break
            advance(t_sw - t)
            t = t_sw
            sigma = -sigma
            m_sw += 1
            refresh_rates()
            continue

        if t_fire > t_end:
            advance(t_end - t)
            t = t_end
            break

        advance(best)
        t = t_fire
        T[rb] = P[rb]
        idx[rb] += 1
        P[rb] = paths[rb].arrival(idx[rb])
        x -= columns[rb]
        if np.any(x < 0):
            raise RuntimeError(f"channel {rb} fired into negative state {x}; engine bug")
        times.append(t)
        fired.append(rb)
        if len(times) >= max_events:
            for r in range(R):
                clocks[r].internal_time = T[r]
                clocks[r].next_internal_arrival = P[r]
            traj = Trajectory(
                initial_state=x0.astype(np.int64).copy(),
                times=np.array(times),
                channels=np.array(fired, dtype=np.int32),
                final_time=t,
                final_state=x.copy(),
            )
            raise EventBudgetExceeded(
                f"event budget {max_events} exhausted at t={t} < t_end={t_end}", traj
            )
        if w_stop is not None and float(w_stop @ x) > cap:
            # Stopped process: freeze state and clocks at the exit time.
            stopped = True
            stop_time = t
            break
        refresh_rates()

    for r in range(R):
        clocks[r].internal_time = T[r]
        clocks[r].next_internal_arrival = P[r]

    return RawRun(
        times=np.array(times),
        channels=np.array(fired, dtype=np.int32),
        final_state=x,
        clocks=clocks,
        consumed=np.array(idx, dtype=np.int64),
        stopped=stopped,
        stop_time=stop_time,
    )
