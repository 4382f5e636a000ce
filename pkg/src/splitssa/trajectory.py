"""Jump trajectories: an initial state plus an ordered list of firing events.

A trajectory is right-continuous (cadlag): ``state_at(traj, net, t)`` includes
every event whose timestamp is exactly ``t``.  Event times are non-decreasing;
simultaneous timestamps can occur in floating point and are resolved in the
deterministic order the simulator fired them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import ReactionNetwork, State

__all__ = ["Trajectory", "state_at", "states_on_grid"]


@dataclass
class Trajectory:
    """The solution path of one simulation run.

    ``times[k]`` / ``channels[k]`` record the k-th firing; ``final_state`` is
    the state at ``final_time``.  ``stopped`` marks a trajectory frozen by a
    norm cap at ``stop_time`` (the state is held constant afterwards).
    """

    initial_state: State
    times: np.ndarray
    channels: np.ndarray
    final_time: float
    final_state: State
    stopped: bool = False
    stop_time: float | None = None
    _cumulative: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def event_count(self) -> int:
        return int(self.times.shape[0])

    def channel_counts(self, channel_count: int) -> np.ndarray:
        """Number of firings per channel over the whole trajectory."""
        return np.bincount(self.channels, minlength=channel_count)

    def _states(self, network: ReactionNetwork) -> np.ndarray:
        # (event_count + 1, D) array of states; row k is the state after k events.
        if self._cumulative is None:
            if self.event_count:
                jumps = -network.stoich[:, self.channels].T
                states = np.vstack([self.initial_state, self.initial_state + np.cumsum(jumps, axis=0)])
            else:
                states = self.initial_state[None, :].copy()
            if np.any(states < 0):
                raise RuntimeError("trajectory replays into negative counts; simulator bug")
            self._cumulative = states
        return self._cumulative


def state_at(traj: Trajectory, network: ReactionNetwork, t: float) -> State:
    """The right-continuous state at time ``t`` (events at exactly ``t`` included)."""
    if not 0.0 <= t <= traj.final_time:
        raise ValueError(f"t={t} outside [0, {traj.final_time}]")
    k = int(np.searchsorted(traj.times, t, side="right"))
    return traj._states(network)[k].copy()


def states_on_grid(traj: Trajectory, network: ReactionNetwork, ts: np.ndarray) -> np.ndarray:
    """States at each of the (sorted or unsorted) grid times ``ts``; shape (len(ts), D)."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size and (ts.min() < 0.0 or ts.max() > traj.final_time):
        raise ValueError(f"grid times outside [0, {traj.final_time}]")
    idx = np.searchsorted(traj.times, ts, side="right")
    return traj._states(network)[idx]
