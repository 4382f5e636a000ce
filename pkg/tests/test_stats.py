import numpy as np
import pytest

from splitssa import (
    ConvergenceTable,
    ErrorEstimate,
    KernelSpec,
    MassAction,
    ReactionNetwork,
    SplitPartition,
    StreamSeedPlan,
    Trajectory,
    WeakErrorEstimate,
    WeightVector,
    coupled_study,
    error_vs_time_study,
    fit_assumption_constants,
    fit_order,
    kernel_value,
    kernel_weighted_integral,
    simulate_exact,
    simulate_split,
    strong_error,
    trajectory_variation,
    weak_error,
    weighted_norm,
)
from splitssa.stats import CoupledSamplingError


def birth_death(k=5.0, mu=0.05):
    return ReactionNetwork(
        np.array([[-1, 1]]), (MassAction(k, (0,)), MassAction(mu, (1,)))
    )


BD_SPLIT = SplitPartition((0,), (1,))


class TestEstimators:
    def test_mean_and_spread_definition(self):
        est = ErrorEstimate.from_samples(np.array([1.0, 9.0]))
        assert est.mean == 5.0
        assert est.spread**2 == pytest.approx(32.0)
        assert est.half_width == pytest.approx(np.sqrt(32.0 / 2))

    def test_mean_within_sample_range(self):
        values = np.array([0.5, 4.0, 2.5, 9.0])
        est = ErrorEstimate.from_samples(values)
        assert est.sample_min <= est.mean <= est.sample_max

    def test_duplicated_samples_zero_spread(self):
        est = ErrorEstimate.from_samples(np.array([4.0, 4.0, 4.0]))
        assert est.spread == 0.0

    def test_weak_sign_indeterminate_flag(self):
        noisy = WeakErrorEstimate(estimate=0.1, spread=10.0, count=100)
        clear = WeakErrorEstimate(estimate=5.0, spread=10.0, count=100)
        assert noisy.sign_indeterminate
        assert not clear.sign_indeterminate


class TestFitOrder:
    def table(self, hs, ms):
        return ConvergenceTable(
            h_values=tuple(hs),
            estimates=tuple(
                ErrorEstimate(mean=m, spread=0.0, count=2, sample_min=m, sample_max=m)
                for m in ms
            ),
        )

    def test_linear_is_order_one(self):
        hs = [1.0, 0.5, 0.25, 0.125]
        assert fit_order(self.table(hs, [3 * h for h in hs])) == pytest.approx(1.0)

    def test_sqrt_is_order_half(self):
        hs = [1.0, 0.5, 0.25, 0.125]
        assert fit_order(self.table(hs, [2 * h**0.5 for h in hs])) == pytest.approx(0.5)

    def test_two_point_slope(self):
        assert fit_order(self.table([1.0, 0.25], [2.0, 1.0])) == pytest.approx(
            np.log(2) / np.log(4)
        )

    def test_h_range_restriction(self):
        hs = [1.0, 0.5, 0.25, 0.125]
        ms = [1.0, 0.5, 0.25 **0.5 * 0.5, 0.125 **0.5 * 0.5]  # kinked data
        t = self.table(hs, ms)
        assert fit_order(t, (0.2, 1.0)) != fit_order(t, (0.05, 0.3))

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            fit_order(self.table([1.0], [1.0]))

    def test_strong_order_is_half_raw_slope(self):
        hs = [1.0, 0.5, 0.25]
        t = self.table(hs, [h for h in hs])
        assert t.strong_order() == pytest.approx(0.5)


class TestTrajectoryVariation:
    def test_empty(self):
        net = birth_death()
        traj = Trajectory(
            initial_state=np.array([5]), times=np.array([]), channels=np.array([], dtype=np.int32),
            final_time=1.0, final_state=np.array([5]),
        )
        v = trajectory_variation(traj, net)
        assert v.total == 0.0 and v.quadratic == 0.0

    def test_three_unit_jumps(self):
        net = birth_death()
        traj = Trajectory(
            initial_state=np.array([5]), times=np.array([0.1, 0.2, 0.3]),
            channels=np.array([0, 1, 0], dtype=np.int32),
            final_time=1.0, final_state=np.array([6]),
        )
        v = trajectory_variation(traj, net)
        assert v.total == pytest.approx(3.0)
        assert v.quadratic == pytest.approx(3.0)

    def test_diagonal_jump(self):
        net = ReactionNetwork(np.array([[1], [1]]), (MassAction(1.0, (1, 1)),))
        traj = Trajectory(
            initial_state=np.array([2, 2]), times=np.array([0.5]),
            channels=np.array([0], dtype=np.int32),
            final_time=1.0, final_state=np.array([1, 1]),
        )
        v = trajectory_variation(traj, net)
        assert v.total == pytest.approx(np.sqrt(2.0))
        assert v.quadratic == pytest.approx(2.0)


def test_grid_exact_coupling_zero_error():
    # constant-rate channel, everything in group one, evaluation on the
    # step grid: the coupled difference vanishes identically
    net = ReactionNetwork(np.array([[-1]]), (MassAction(5.0, (0,)),))
    part = SplitPartition((0,), ())
    plan = StreamSeedPlan(5150, 1)
    est = strong_error(net, part, KernelSpec.lie(0.5), [0], 20.0, 64, plan)
    assert est.mean == 0.0
    assert est.spread == 0.0


def test_weak_error_zero_for_identical_dynamics():
    net = ReactionNetwork(np.array([[-1]]), (MassAction(5.0, (0,)),))
    part = SplitPartition((0,), ())
    plan = StreamSeedPlan(5151, 1)
    est = weak_error(net, part, KernelSpec.lie(0.5), [0], 20.0, 64, plan, f="first_factorial")
    assert est.estimate == 0.0
    assert est.sign_indeterminate  # zero signal, zero width


def test_weak_linear_observable_equals_mean_difference():
    net = birth_death()
    plan = StreamSeedPlan(5152, 2)
    n, h, t = 160, 0.5, 30.0
    res = coupled_study(
        net, BD_SPLIT, [50], t, n, plan,
        h_values=[h], observables=("first_factorial",),
    )
    # oracle: run the coupling by hand and average the state differences
    diffs = np.empty(n)
    for i in range(n):
        paths = plan.paths_for(i)
        x = simulate_exact(net, [50], t, paths).final_state[0]
        y = simulate_split(net, BD_SPLIT, KernelSpec.lie(h), [50], t, paths).final_state[0]
        diffs[i] = float(y) - float(x)
    est = res.weak[("lie", "first_factorial")][0]
    assert est.estimate == pytest.approx(diffs.mean())
    strong = res.strong["lie"].estimates[0]
    assert strong.mean == pytest.approx((diffs**2).mean())


def test_rerunning_sample_reproduces_difference_bit_exactly():
    net = birth_death()
    plan = StreamSeedPlan(5153, 2)
    a = strong_error(net, BD_SPLIT, KernelSpec.lie(0.5), [50], 40.0, 50, plan)
    b = strong_error(net, BD_SPLIT, KernelSpec.lie(0.5), [50], 40.0, 50, plan)
    assert a == b


def test_weighted_norm_option():
    net = ReactionNetwork(
        np.array([[-1, 1], [0, 0]]),
        (MassAction(5.0, (0, 0)), MassAction(0.05, (1, 0))),
    )
    part = SplitPartition((0,), (1,))
    plan = StreamSeedPlan(5154, 2)
    w = WeightVector(np.array([1.0, 3.0]))
    est = strong_error(
        net, part, KernelSpec.lie(0.5), [50, 0], 20.0, 40, plan,
        norm="weighted", norm_weights=w,
    )
    est_e = strong_error(net, part, KernelSpec.lie(0.5), [50, 0], 20.0, 40, plan)
    # second species never moves, so both norms agree here
    assert est.mean == pytest.approx(est_e.mean)


def test_sampling_failures_are_counted():
    net = ReactionNetwork(np.array([[-1]]), (MassAction(50.0, (0,)),))
    part = SplitPartition((0,), ())
    plan = StreamSeedPlan(5155, 1)
    with pytest.raises(CoupledSamplingError) as err:
        strong_error(
            net, part, KernelSpec.lie(0.5), [0], 100.0, 8, plan, max_events=40,
        )
    assert err.value.failures == 8


def test_kernel_weighted_integral_matches_piecewise_oracle():
    # independent oracle: merge reaction events with kernel switch times and
    # sum value * propensity * interval length directly
    net = birth_death()
    plan = StreamSeedPlan(5156, 2)
    spec = KernelSpec.lie(0.8)
    t_end = 10.3
    traj = simulate_split(net, BD_SPLIT, spec, [50], t_end, plan.paths_for(0))
    from splitssa import switch_schedule, evaluate_propensity, state_at

    knots = np.unique(
        np.concatenate(
            [[0.0], traj.times, switch_schedule(spec, t_end).switch_times, [t_end]]
        )
    )
    for r in range(2):
        oracle = 0.0
        for a, b in zip(knots[:-1], knots[1:]):
            w = evaluate_propensity(net, r, state_at(traj, net, a))
            oracle += kernel_value(spec, float(a)) * w * (b - a)
        assert kernel_weighted_integral(traj, net, r, spec) == pytest.approx(
            oracle, abs=1e-8
        )


@pytest.mark.parametrize("method", ["lie", "strang"])
def test_kernel_integral_bound_on_sampled_paths(method):
    # the quantity driving the splitting error obeys
    # |int sigma w_r(Y)| <= h/2 (w_r(Y_t) + L_r V(Y)) path by path
    net = birth_death()
    h = 0.5
    spec = KernelSpec.lie(h) if method == "lie" else KernelSpec.strang(h)
    plan = StreamSeedPlan(5157, 2)
    n_paths = 20
    t_end = 10.3
    l = WeightVector.ones(1)
    for i in range(n_paths):
        traj = simulate_split(net, BD_SPLIT, spec, [50], t_end, plan.paths_for(i))
        var = trajectory_variation(traj, net)
        peak = max(weighted_norm(traj.final_state, l), weighted_norm(traj.initial_state, l))
        rep = fit_assumption_constants(net, l, peak + var.total + 1)
        for r in range(2):
            lhs = abs(kernel_weighted_integral(traj, net, r, spec))
            from splitssa import evaluate_propensity

            w_t = evaluate_propensity(net, r, traj.final_state)
            rhs = 0.5 * h * (w_t + rep.lipschitz[r] * var.total)
            assert lhs <= rhs + 1e-9


def test_error_vs_time_study_shapes():
    net = birth_death()
    plan = StreamSeedPlan(5158, 2)
    res = error_vs_time_study(
        net, BD_SPLIT, [50], [5.0, 10.0, 20.0], 30, plan, h_values=[1.0, 0.5]
    )
    assert res.t_grid.tolist() == [5.0, 10.0, 20.0]
    assert len(res.estimates) == 2
    assert len(res.estimates[0]) == 3
    table = res.table_at_time(2)
    assert table.h_values == (1.0, 0.5)
    assert all(e.mean >= 0.0 for e in table.estimates)


def test_convergence_table_rejects_duplicate_h():
    est = ErrorEstimate(mean=1.0, spread=0.0, count=2, sample_min=1.0, sample_max=1.0)
    with pytest.raises(ValueError):
        ConvergenceTable(h_values=(1.0, 1.0), estimates=(est, est))


def test_independent_weak_mode_agrees_but_is_noisier():
    # cross-check of the coupled estimator: disjoint ensembles give a
    # statistically compatible estimate with a far larger uncertainty
    net = birth_death()
    plan = StreamSeedPlan(5159, 2)
    n, h, t = 400, 1.0, 50.0
    coupled = weak_error(
        net, BD_SPLIT, KernelSpec.lie(h), [50], t, n, plan, f="first_factorial"
    )
    indep = weak_error(
        net, BD_SPLIT, KernelSpec.lie(h), [50], t, n, plan,
        f="first_factorial", independent=True,
    )
    assert indep.half_width > 5 * coupled.half_width
    assert abs(indep.estimate - coupled.estimate) <= 4 * (
        indep.half_width + coupled.half_width
    )
