"""Compiled fast path for mass-action networks.

This mirrors :func:`splitssa.engine.run_reference` operation for operation
(same delay formula, same advancement order, same tie-breaking), restricted
to all-mass-action networks so the inner loop can be jitted.  The kernel is
resumable: it returns to Python whenever a channel needs more materialized
Poisson arrivals or the event buffer fills, and is re-entered with the same
mutable state.

Equality of the two engines on shared paths is asserted by the test suite;
any divergence is a bug.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .kernel import KernelSpec
from .network import WeightVector
from .paths import PoissonPath

try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(f):
            return f

        return wrap


__all__ = ["HAVE_NUMBA", "run_fast"]

_DONE = 0
_NEED_ARRIVALS = 1
_EVENTS_FULL = 2
_BUDGET = 3

_INF = 1e308


@njit(cache=True)
def _kernel_loop(
    stoich,  # int64[D, R]
    ma_rate,  # float64[R]
    ma_mult,  # int64[R, D]
    needs_clamp,  # uint8[R]
    group,  # uint8[R]
    use_kernel,  # bool
    half,  # float64
    phase,  # float64
    t_end,  # float64
    arr,  # float64[R, cap]: padded arrival snapshots
    arr_len,  # int64[R]
    x,  # int64[D], mutated
    T,  # float64[R], mutated
    idx,  # int64[R], mutated
    ev_t,  # float64[ev_cap], mutated
    ev_c,  # int32[ev_cap], mutated
    max_events,  # int64
    stop_cap,  # float64, negative disables
    stop_w,  # float64[D]
    t,  # float64 resume scalar
    sigma,  # int64 resume scalar (+1 / -1)
    m_sw,  # int64 resume scalar
    n_ev,  # int64 resume scalar
):
    D = stoich.shape[0]
    R = stoich.shape[1]
    wcur = np.empty(R, dtype=np.float64)
    status = _DONE
    aux = -1
    stopped = 0
    stop_time = -1.0

    while True:
        best = _INF
        rb = -1
        for r in range(R):
            w = ma_rate[r]
            if w > 0.0 and needs_clamp[r] != 0:
                for d in range(D):
                    if x[d] - stoich[d, r] < 0:
                        w = 0.0
                        break
            if w > 0.0:
                for d in range(D):
                    m = ma_mult[r, d]
                    if m > 0:
                        xi = x[d]
                        for k in range(m):
                            w *= xi - k
                        if w == 0.0:
                            break
            if use_kernel:
                if group[r] == 0:
                    w *= 2.0 if sigma > 0 else 0.0
                else:
                    w *= 0.0 if sigma > 0 else 2.0
            wcur[r] = w
            if w > 0.0:
                if idx[r] >= arr_len[r]:
                    status = _NEED_ARRIVALS
                    aux = r
                    return status, aux, t, sigma, m_sw, n_ev, stopped, stop_time
                d_next = (arr[r, idx[r]] - T[r]) / w
                if d_next < best:
                    best = d_next
                    rb = r

        t_fire = t + best if rb >= 0 else _INF
        t_sw = m_sw * half - phase if use_kernel else _INF

        if t_sw <= t_fire:
            # Switch events own the boundary instant (the wave is
            # right-continuous): at a timestamp tie they run first.
            if t_sw >= t_end:
                dt = t_end - t
                for r in range(R):
                    T[r] += wcur[r] * dt
                t = t_end
                return _DONE, aux, t, sigma, m_sw, n_ev, stopped, stop_time
            dt = t_sw - t
            for r in range(R):
                T[r] += wcur[r] * dt
            t = t_sw
            sigma = -sigma
            m_sw += 1
            continue

        if t_fire > t_end:
            dt = t_end - t
            for r in range(R):
                T[r] += wcur[r] * dt
            t = t_end
            return _DONE, aux, t, sigma, m_sw, n_ev, stopped, stop_time

        if n_ev >= ev_t.shape[0]:
            status = _EVENTS_FULL
            return status, aux, t, sigma, m_sw, n_ev, stopped, stop_time

        dt = best
        for r in range(R):
            T[r] += wcur[r] * dt
        t = t_fire
        T[rb] = arr[rb, idx[rb]]
        idx[rb] += 1
        for d in range(D):
            x[d] -= stoich[d, rb]
        ev_t[n_ev] = t
        ev_c[n_ev] = rb
        n_ev += 1
        if n_ev >= max_events:
            status = _BUDGET
            return status, aux, t, sigma, m_sw, n_ev, stopped, stop_time
        if stop_cap >= 0.0:
            s = 0.0
            for d in range(D):
                s += stop_w[d] * x[d]
            if s > stop_cap:
                stopped = 1
                stop_time = t
                return _DONE, aux, t, sigma, m_sw, n_ev, stopped, stop_time


def _snapshot_arrivals(paths: Sequence[PoissonPath], idx: np.ndarray, slack: int) -> tuple[np.ndarray, np.ndarray]:
    lens = np.array([max(p.high_water, int(i) + slack) for p, i in zip(paths, idx)], dtype=np.int64)
    cap = int(lens.max())
    arr = np.zeros((len(paths), cap), dtype=np.float64)
    for r, p in enumerate(paths):
        arr[r, : lens[r]] = p.arrivals_array(int(lens[r]))
    return arr, lens


def run_fast(
    compiled,
    x0: np.ndarray,
    t_end: float,
    paths: Sequence[PoissonPath],
    *,
    group: np.ndarray | None = None,
    spec: KernelSpec | None = None,
    max_events: int,
    stop_cap: float | None = None,
    stop_weights: WeightVector | None = None,
):
    """Driver for the jitted loop; resumes on arrival/buffer exhaustion.

    Returns the same tuple layout the reference engine wraps into a RawRun:
    (times, channels, final_state, T, consumed, stopped, stop_time).
    """
    R = compiled.channel_count
    D = compiled.species_count
    use_kernel = spec is not None
    if use_kernel:
        half, phase = spec.half_step, spec.phase
        grp = group.astype(np.uint8)
        m_sw = 1
    else:
        half = phase = 0.0
        grp = np.zeros(R, dtype=np.uint8)
        m_sw = 0

    x = x0.astype(np.int64).copy()
    T = np.zeros(R, dtype=np.float64)
    idx = np.zeros(R, dtype=np.int64)
    cap = -1.0 if stop_cap is None else float(stop_cap)
    stop_w = (
        (stop_weights or WeightVector.ones(D)).weights.astype(np.float64)
        if cap >= 0.0
        else np.zeros(D, dtype=np.float64)
    )

    ev_cap = 4096
    ev_t = np.empty(ev_cap, dtype=np.float64)
    ev_c = np.empty(ev_cap, dtype=np.int32)

    if cap >= 0.0 and float(stop_w @ x) > cap:
        return (
            np.array([]),
            np.array([], dtype=np.int32),
            x,
            T,
            idx,
            True,
            0.0,
            False,
        )

    t = 0.0
    sigma = 1
    n_ev = 0
    slack = 64
    arr, lens = _snapshot_arrivals(paths, idx, slack)

    while True:
        status, aux, t, sigma, m_sw, n_ev, stopped, stop_time = _kernel_loop(
            compiled.network.stoich,
            compiled.ma_rate,
            compiled.ma_mult,
            compiled.needs_clamp,
            grp,
            use_kernel,
            half,
            phase,
            t_end,
            arr,
            lens,
            x,
            T,
            idx,
            ev_t,
            ev_c,
            max_events,
            cap,
            stop_w,
            t,
            sigma,
            m_sw,
            n_ev,
        )
        if status == _DONE:
            break
        if status == _NEED_ARRIVALS:
            slack = min(slack * 4, 65536)
            paths[aux].arrival(int(idx[aux]) + slack - 1)
            arr, lens = _snapshot_arrivals(paths, idx, slack)
            continue
        if status == _EVENTS_FULL:
            ev_t = np.concatenate([ev_t, np.empty(ev_t.shape[0], dtype=np.float64)])
            ev_c = np.concatenate([ev_c, np.empty(ev_c.shape[0], dtype=np.int32)])
            continue
        if status == _BUDGET:
            return (
                ev_t[:n_ev].copy(),
                ev_c[:n_ev].copy(),
                x,
                T,
                idx,
                False,
                None,
                True,
            )
        raise RuntimeError(f"unknown kernel status {status}")

    return (
        ev_t[:n_ev].copy(),
        ev_c[:n_ev].copy(),
        x,
        T,
        idx,
        bool(stopped),
        (float(stop_time) if stopped else None),
        False,
    )
