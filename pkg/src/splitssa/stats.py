"""Coupled-trajectory error estimators, variation diagnostics, order fits.

Strong and weak errors are measured on *coupled* pairs: for each sample id
a fresh set of per-channel Poisson paths is derived from the seed plan, the
exact simulator and the split-step simulator both consume those same paths,
and the difference of the two states at the evaluation time is one sample
of the error functional.  Sharing the exact trajectory across every step
size and method in a sweep is both cheaper and exactly what the common
reaction path coupling is for.

Estimator conventions: for per-sample values ``v_i`` (squared state
differences for the strong error, observable differences for the weak
error),

    M = mean(v_i),   S^2 = sum((v_i - M)^2) / (N - 1),   half_width = S / sqrt(N)

Uncertainty should be quoted as a small multiple of ``half_width``
(:data:`UNCERTAINTY_MULTIPLIER`, default 2); a weak-error estimate
smaller than that multiple of its half width is flagged sign-indeterminate.

A note on orders: :func:`fit_order` returns the raw log-log slope of the
fitted column against ``h``.  The *strong order* customarily quoted for a
scheme is the order of the root-mean-square error, i.e. half the raw slope
of the mean-square column; :meth:`ConvergenceTable.strong_order` does that
division for you.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import DEFAULT_EVENT_BUDGET, EventBudgetExceeded
from .exact import simulate_exact
from .kernel import KernelSpec, kernel_integral
from .network import ReactionNetwork, SplitPartition, WeightVector, evaluate_propensity
from .paths import StreamSeedPlan
from .splitstep import simulate_split
from .trajectory import Trajectory, states_on_grid

__all__ = [
    "UNCERTAINTY_MULTIPLIER",
    "ErrorEstimate",
    "WeakErrorEstimate",
    "ConvergenceTable",
    "StudyResult",
    "TimewiseResult",
    "OBSERVABLES",
    "strong_error",
    "weak_error",
    "coupled_study",
    "error_vs_time_study",
    "trajectory_variation",
    "VariationSummary",
    "fit_order",
    "kernel_weighted_integral",
    "CoupledSamplingError",
]

UNCERTAINTY_MULTIPLIER = 2.0


class CoupledSamplingError(RuntimeError):
    """One or more coupled samples failed (e.g. event budget); run aborted."""

    def __init__(self, message: str, failures: int):
        super().__init__(message)
        self.failures = failures


@dataclass(frozen=True)
class ErrorEstimate:
    """Monte Carlo estimate of a mean-square error functional."""

    mean: float
    spread: float
    count: int
    sample_min: float
    sample_max: float

    @property
    def half_width(self) -> float:
        return self.spread / np.sqrt(self.count)

    @staticmethod
    def from_samples(values: np.ndarray) -> "ErrorEstimate":
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n < 2:
            raise ValueError("need at least two samples")
        m = float(values.mean())
        s = float(np.sqrt(np.sum((values - m) ** 2) / (n - 1)))
        return ErrorEstimate(
            mean=m,
            spread=s,
            count=n,
            sample_min=float(values.min()),
            sample_max=float(values.max()),
        )


@dataclass(frozen=True)
class WeakErrorEstimate:
    """Coupled estimate of ``E f(Y) - E f(X)`` with its standard error."""

    estimate: float
    spread: float
    count: int

    @property
    def half_width(self) -> float:
        return self.spread / np.sqrt(self.count)

    @property
    def sign_indeterminate(self) -> bool:
        """Too noisy to trust the sign (|estimate| below the quoted uncertainty)."""
        if self.estimate == 0.0:
            return True
        return abs(self.estimate) < UNCERTAINTY_MULTIPLIER * self.half_width

    @staticmethod
    def from_samples(values: np.ndarray) -> "WeakErrorEstimate":
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n < 2:
            raise ValueError("need at least two samples")
        m = float(values.mean())
        s = float(np.sqrt(np.sum((values - m) ** 2) / (n - 1)))
        return WeakErrorEstimate(estimate=m, spread=s, count=n)


@dataclass(frozen=True)
class ConvergenceTable:
    """Rows of (h, mean-square estimate) for one model/method/time."""

    h_values: tuple[float, ...]
    estimates: tuple[ErrorEstimate, ...]

    def __post_init__(self) -> None:
        hs = self.h_values
        if len(hs) != len(self.estimates):
            raise ValueError("h_values and estimates must align")
        if len(set(hs)) != len(hs) or any(h <= 0 for h in hs):
            raise ValueError("h values must be distinct and positive")

    def mean_squares(self) -> np.ndarray:
        return np.array([e.mean for e in self.estimates])

    def fit_order(self, h_range: tuple[float, float] | None = None) -> float:
        """Raw least-squares slope of log(M) against log(h) over ``h_range``."""
        return fit_order(self, h_range)

    def strong_order(self, h_range: tuple[float, float] | None = None) -> float:
        """Order of the RMS error: half the raw mean-square slope."""
        return 0.5 * self.fit_order(h_range)

    @property
    def fitted_order(self) -> float:
        return self.fit_order()


def fit_order(table: ConvergenceTable, h_range: tuple[float, float] | None = None) -> float:
    """Least-squares slope of ``log(M)`` vs ``log(h)``, restricted to ``h_range``."""
    hs = np.array(table.h_values)
    ms = table.mean_squares()
    if h_range is not None:
        lo, hi = h_range
        keep = (hs >= lo) & (hs <= hi)
        hs, ms = hs[keep], ms[keep]
    if hs.size < 2:
        raise ValueError("need at least two rows in the requested h range")
    if np.any(ms <= 0):
        raise ValueError("cannot fit an order through non-positive error values")
    return float(np.polyfit(np.log(hs), np.log(ms), 1)[0])


def _first_factorial(x: np.ndarray, species: int) -> float:
    return float(x[species])


def _second_factorial(x: np.ndarray, species: int) -> float:
    return float(x[species] * (x[species] - 1))


#: Observable selectors for weak errors (first two factorial moments).
OBSERVABLES: dict[str, Callable[[np.ndarray, int], float]] = {
    "first_factorial": _first_factorial,
    "second_factorial": _second_factorial,
}


@dataclass(frozen=True)
class StudyResult:
    """Output of :func:`coupled_study`.

    ``strong[method]`` is a :class:`ConvergenceTable` over the study's h
    values; ``weak[(method, observable)]`` is a tuple of
    :class:`WeakErrorEstimate`, one per h.
    """

    h_values: tuple[float, ...]
    t_eval: float
    n_samples: int
    strong: dict[str, ConvergenceTable]
    weak: dict[tuple[str, str], tuple[WeakErrorEstimate, ...]]


@dataclass(frozen=True)
class TimewiseResult:
    """Mean-square error on a time grid, one table column per h."""

    h_values: tuple[float, ...]
    t_grid: np.ndarray
    estimates: list[list[ErrorEstimate]]  # indexed [h][t]
    n_samples: int

    def table_at_time(self, t_index: int) -> ConvergenceTable:
        return ConvergenceTable(
            h_values=self.h_values,
            estimates=tuple(self.estimates[j][t_index] for j in range(len(self.h_values))),
        )


def _norm_sq(diff: np.ndarray, weights: np.ndarray | None) -> float:
    if weights is None:
        return float(diff @ diff)
    v = weights @ diff
    return float(v * v)


def _study_chunk(
    network: ReactionNetwork,
    partition: SplitPartition,
    x0,
    t_eval: float,
    t_end: float,
    plan: StreamSeedPlan,
    sample_ids: Sequence[int],
    specs: Sequence[KernelSpec],
    observables: Sequence[str],
    norm_weights: np.ndarray | None,
    stop_cap: float | None,
    stop_weights: WeightVector | None,
    max_events: int,
    engine: str,
) -> tuple[np.ndarray, int]:
    n_cells = len(specs)
    n_obs = len(observables)
    out = np.empty((len(sample_ids), n_cells * (1 + n_obs)), dtype=np.float64)
    failures = 0
    at_end = t_eval == t_end
    t_arr = np.array([t_eval])
    for row, i in enumerate(sample_ids):
        paths = plan.paths_for(i)
        try:
            X = simulate_exact(
                network, x0, t_end, paths,
                max_events=max_events, stop_cap=stop_cap, stop_weights=stop_weights,
                engine=engine,
            )
            xs = X.final_state if at_end else states_on_grid(X, network, t_arr)[0]
            col = 0
            for spec in specs:
                Y = simulate_split(
                    network, partition, spec, x0, t_end, paths,
                    max_events=max_events, stop_cap=stop_cap, stop_weights=stop_weights,
                    engine=engine,
                )
                ys = Y.final_state if at_end else states_on_grid(Y, network, t_arr)[0]
                diff = (ys - xs).astype(np.float64)
                out[row, col] = _norm_sq(diff, norm_weights)
                col += 1
                for name in observables:
                    f = OBSERVABLES[name]
                    out[row, col] = f(ys, 0) - f(xs, 0)
                    col += 1
        except EventBudgetExceeded:
            failures += 1
            out[row, :] = np.nan
    return out, failures


def coupled_study(
    network: ReactionNetwork,
    partition: SplitPartition,
    x0,
    t_eval: float,
    n_samples: int,
    plan: StreamSeedPlan,
    *,
    h_values: Sequence[float],
    methods: Sequence[str] = ("lie",),
    observables: Sequence[str] = (),
    t_end: float | None = None,
    norm: str = "euclidean",
    norm_weights: WeightVector | None = None,
    stop_cap: float | None = None,
    stop_weights: WeightVector | None = None,
    max_events: int = DEFAULT_EVENT_BUDGET,
    engine: str = "auto",
    n_jobs: int | None = None,
    sample_offset: int = 0,
) -> StudyResult:
    """Coupled strong/weak error sweep over step sizes and methods.

    One exact trajectory per sample id is shared by every (method, h) cell,
    all riding the same Poisson paths.  ``norm`` is ``"euclidean"`` (the
    default error norm) or ``"weighted"`` with ``norm_weights``.  With
    ``n_jobs`` set, sample chunks run in a process pool; per-sample values
    are reassembled in id order, so results are independent of scheduling.
    """
    if t_end is None:
        t_end = t_eval
    if not 0 < t_eval <= t_end:
        raise ValueError("need 0 < t_eval <= t_end")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    partition.validate(network.channel_count)
    for name in observables:
        if name not in OBSERVABLES:
            raise ValueError(f"unknown observable {name!r}; have {sorted(OBSERVABLES)}")
    if norm == "euclidean":
        nw = None
    elif norm == "weighted":
        nw = (norm_weights or WeightVector.ones(network.species_count)).weights
    else:
        raise ValueError("norm must be 'euclidean' or 'weighted'")

    specs = []
    for method in methods:
        if method not in ("lie", "strang"):
            raise ValueError(f"method must be 'lie' or 'strang', got {method!r}")
        for h in h_values:
            specs.append(KernelSpec.lie(h) if method == "lie" else KernelSpec.strang(h))

    ids = list(range(sample_offset, sample_offset + n_samples))
    args = (
        network, partition, x0, t_eval, t_end, plan,
    )
    kwargs_tail = (
        tuple(specs), tuple(observables), nw, stop_cap, stop_weights, max_events, engine,
    )
    if n_jobs and n_jobs > 1:
        chunk = max(64, n_samples // (4 * n_jobs))
        chunks = [ids[a : a + chunk] for a in range(0, len(ids), chunk)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(
                pool.map(_study_chunk_star, [(args, c, kwargs_tail) for c in chunks])
            )
        values = np.concatenate([p[0] for p in parts], axis=0)
        failures = sum(p[1] for p in parts)
    else:
        values, failures = _study_chunk(*args, ids, *kwargs_tail)

    if failures:
        raise CoupledSamplingError(
            f"{failures} of {n_samples} coupled samples failed; see event budget/stop settings",
            failures,
        )

    n_obs = len(observables)
    strong: dict[str, ConvergenceTable] = {}
    weak: dict[tuple[str, str], tuple[WeakErrorEstimate, ...]] = {}
    width = 1 + n_obs
    for m_i, method in enumerate(methods):
        ests = []
        weak_cols: dict[str, list[WeakErrorEstimate]] = {name: [] for name in observables}
        for h_i, h in enumerate(h_values):
            base = (m_i * len(h_values) + h_i) * width
            ests.append(ErrorEstimate.from_samples(values[:, base]))
            for o_i, name in enumerate(observables):
                weak_cols[name].append(WeakErrorEstimate.from_samples(values[:, base + 1 + o_i]))
        strong[method] = ConvergenceTable(h_values=tuple(h_values), estimates=tuple(ests))
        for name in observables:
            weak[(method, name)] = tuple(weak_cols[name])
    return StudyResult(
        h_values=tuple(h_values),
        t_eval=float(t_eval),
        n_samples=n_samples,
        strong=strong,
        weak=weak,
    )


def _study_chunk_star(packed):
    args, chunk, tail = packed
    return _study_chunk(*args, chunk, *tail)


def strong_error(
    network: ReactionNetwork,
    partition: SplitPartition,
    spec: KernelSpec,
    x0,
    t_eval: float,
    n_samples: int,
    plan: StreamSeedPlan,
    **kwargs,
) -> ErrorEstimate:
    """Mean-square state difference of the coupled pair at ``t_eval``."""
    res = coupled_study(
        network, partition, x0, t_eval, n_samples, plan,
        h_values=[spec.h], methods=[spec.method], **kwargs,
    )
    return res.strong[spec.method].estimates[0]


def weak_error(
    network: ReactionNetwork,
    partition: SplitPartition,
    spec: KernelSpec,
    x0,
    t_eval: float,
    n_samples: int,
    plan: StreamSeedPlan,
    f: str = "first_factorial",
    independent: bool = False,
    **kwargs,
) -> WeakErrorEstimate:
    """Estimate of ``E[f(Y)] - E[f(X)]`` at ``t_eval``.

    By default the two expectations are estimated on coupled samples (shared
    paths), which reduces the variance enormously; ``independent=True``
    instead uses disjoint sample ids for the two ensembles, as a cross-check
    of the coupled estimator.  Check
    :attr:`WeakErrorEstimate.sign_indeterminate` before trusting the sign.
    """
    if not independent:
        res = coupled_study(
            network, partition, x0, t_eval, n_samples, plan,
            h_values=[spec.h], methods=[spec.method], observables=[f], **kwargs,
        )
        return res.weak[(spec.method, f)][0]

    if f not in OBSERVABLES:
        raise ValueError(f"unknown observable {f!r}; have {sorted(OBSERVABLES)}")
    func = OBSERVABLES[f]
    engine = kwargs.pop("engine", "auto")
    t_end = kwargs.pop("t_end", None) or t_eval
    stop_cap = kwargs.pop("stop_cap", None)
    stop_weights = kwargs.pop("stop_weights", None)
    max_events = kwargs.pop("max_events", DEFAULT_EVENT_BUDGET)
    offset = kwargs.pop("sample_offset", 0)
    if kwargs:
        raise TypeError(f"unsupported options for independent mode: {sorted(kwargs)}")
    common = dict(
        max_events=max_events, stop_cap=stop_cap, stop_weights=stop_weights, engine=engine
    )
    t_arr = np.array([t_eval])
    fx = np.empty(n_samples)
    fy = np.empty(n_samples)
    for row, i in enumerate(range(offset, offset + n_samples)):
        X = simulate_exact(network, x0, t_end, plan.paths_for(i), **common)
        xs = X.final_state if t_eval == t_end else states_on_grid(X, network, t_arr)[0]
        fx[row] = func(xs, 0)
        j = i + n_samples  # disjoint ids, hence independent streams
        Y = simulate_split(
            network, partition, spec, x0, t_end, plan.paths_for(j), **common
        )
        ys = Y.final_state if t_eval == t_end else states_on_grid(Y, network, t_arr)[0]
        fy[row] = func(ys, 0)
    estimate = float(fy.mean() - fx.mean())
    spread = float(np.sqrt(fx.var(ddof=1) + fy.var(ddof=1)))
    return WeakErrorEstimate(estimate=estimate, spread=spread, count=n_samples)


def error_vs_time_study(
    network: ReactionNetwork,
    partition: SplitPartition,
    x0,
    t_grid: Sequence[float],
    n_samples: int,
    plan: StreamSeedPlan,
    *,
    h_values: Sequence[float],
    method: str = "lie",
    max_events: int = DEFAULT_EVENT_BUDGET,
    engine: str = "auto",
    sample_offset: int = 0,
) -> TimewiseResult:
    """Mean-square error as a function of time, one curve per ``h``."""
    t_grid = np.asarray(sorted(t_grid), dtype=np.float64)
    if t_grid.size == 0 or t_grid[0] <= 0:
        raise ValueError("t_grid must contain positive times")
    t_end = float(t_grid[-1])
    partition.validate(network.channel_count)
    n_h = len(h_values)
    acc = np.empty((n_samples, n_h, t_grid.size), dtype=np.float64)
    for row, i in enumerate(range(sample_offset, sample_offset + n_samples)):
        paths = plan.paths_for(i)
        X = simulate_exact(network, x0, t_end, paths, max_events=max_events, engine=engine)
        xs = states_on_grid(X, network, t_grid)
        for j, h in enumerate(h_values):
            spec = KernelSpec.lie(h) if method == "lie" else KernelSpec.strang(h)
            Y = simulate_split(
                network, partition, spec, x0, t_end, paths,
                max_events=max_events, engine=engine,
            )
            ys = states_on_grid(Y, network, t_grid)
            d = (ys - xs).astype(np.float64)
            acc[row, j, :] = np.einsum("td,td->t", d, d)
    estimates = [
        [ErrorEstimate.from_samples(acc[:, j, k]) for k in range(t_grid.size)]
        for j in range(n_h)
    ]
    return TimewiseResult(
        h_values=tuple(h_values), t_grid=t_grid, estimates=estimates, n_samples=n_samples
    )


@dataclass(frozen=True)
class VariationSummary:
    total: float
    quadratic: float


def trajectory_variation(traj: Trajectory, network: ReactionNetwork) -> VariationSummary:
    """Total and quadratic variation: sums of jump norms and squared norms."""
    col_sq = np.sum(network.stoich.astype(np.float64) ** 2, axis=0)
    counts = traj.channel_counts(network.channel_count)
    return VariationSummary(
        total=float(counts @ np.sqrt(col_sq)),
        quadratic=float(counts @ col_sq),
    )


def kernel_weighted_integral(
    traj: Trajectory,
    network: ReactionNetwork,
    r: int,
    spec: KernelSpec,
    t: float | None = None,
) -> float:
    """Exact value of ``integral_0^t sigma(s) * w_r(Y_s) ds`` along a path.

    The integrand is piecewise constant between events, so the integral is a
    finite sum of closed-form kernel integrals; no quadrature error.  This is
    the quantity whose smallness (at most ``h/2`` times propensity level plus
    Lipschitz constant times total variation) drives the split-step error.
    """
    if t is None:
        t = traj.final_time
    if not 0 < t <= traj.final_time:
        raise ValueError("t outside trajectory support")
    cut = int(np.searchsorted(traj.times, t, side="right"))
    knots = np.concatenate([[0.0], traj.times[:cut], [t]])
    states = traj._states(network)
    total = 0.0
    for k in range(knots.size - 1):
        a, b = knots[k], knots[k + 1]
        if b > a:
            w = evaluate_propensity(network, r, states[k])
            total += w * (kernel_integral(spec, b) - kernel_integral(spec, a))
    return total
