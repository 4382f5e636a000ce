"""The compiled fast path must reproduce the reference loop event for event."""

import numpy as np
import pytest

from splitssa import (
    EventBudgetExceeded,
    KernelSpec,
    StreamSeedPlan,
    bundled_model,
    flatten,
    line_mesh,
    reaction_diffusion_partition,
    simulate_exact,
    simulate_split,
)

MODELS = ["birth_death", "dimerization", "bimolecular", "illposed"]


def _plan_for(doc, seed):
    return StreamSeedPlan(seed, doc.network.channel_count)


def _assert_same(a, b):
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.channels, b.channels)
    assert np.array_equal(a.final_state, b.final_state)
    assert a.stopped == b.stopped
    assert a.stop_time == b.stop_time


@pytest.mark.parametrize("name", MODELS)
def test_exact_engines_agree(name):
    doc = bundled_model(name)
    plan = _plan_for(doc, 1000)
    t_end = 1.0 if name == "illposed" else 60.0
    cap = 1000.0 if name == "illposed" else None
    runs = []
    for engine in ("python", "numba"):
        runs.append(
            simulate_exact(
                doc.network, doc.initial_state, t_end, plan.paths_for(0),
                stop_cap=cap, engine=engine,
            )
        )
    _assert_same(*runs)


@pytest.mark.parametrize("name", MODELS)
@pytest.mark.parametrize("method", ["lie", "strang"])
def test_split_engines_agree(name, method):
    doc = bundled_model(name)
    plan = _plan_for(doc, 2000)
    t_end = 1.0 if name == "illposed" else 60.0
    cap = 1000.0 if name == "illposed" else None
    h = 0.01 if name == "illposed" else 0.7
    spec = KernelSpec.lie(h) if method == "lie" else KernelSpec.strang(h)
    runs = []
    for engine in ("python", "numba"):
        runs.append(
            simulate_split(
                doc.network, doc.split, spec, doc.initial_state, t_end,
                plan.paths_for(3), stop_cap=cap, engine=engine,
            )
        )
    _assert_same(*runs)
    assert runs[0].event_count > 0


def test_spatial_model_engines_agree():
    doc = bundled_model("birth_death")
    model = flatten(doc.network, line_mesh(3, 1.5))
    part = reaction_diffusion_partition(model)
    x0 = np.zeros(3, dtype=np.int64)
    x0[0] = 40
    plan = StreamSeedPlan(3000, model.flattened.channel_count)
    runs = [
        simulate_split(
            model.flattened, part, KernelSpec.lie(0.5), x0, 25.0,
            plan.paths_for(0), engine=engine,
        )
        for engine in ("python", "numba")
    ]
    _assert_same(*runs)
    assert runs[0].event_count > 100


def test_budget_truncation_agrees():
    doc = bundled_model("birth_death")
    plan = _plan_for(doc, 4000)
    trajs = []
    for engine in ("python", "numba"):
        with pytest.raises(EventBudgetExceeded) as err:
            simulate_exact(
                doc.network, doc.initial_state, 100.0, plan.paths_for(0),
                max_events=100, engine=engine,
            )
        trajs.append(err.value.trajectory)
    assert np.array_equal(trajs[0].times, trajs[1].times)
    assert np.array_equal(trajs[0].channels, trajs[1].channels)


def test_stopped_process_agrees_and_freezes():
    # monotone growth guarantees the cap is crossed, at the 21st birth
    doc = bundled_model("birth_death")
    net = doc.network
    plan = _plan_for(doc, 5000)
    runs = [
        simulate_exact(
            net, [0], 100.0, plan.paths_for(0), stop_cap=20.0, engine=engine
        )
        for engine in ("python", "numba")
    ]
    _assert_same(*runs)
    tr = runs[0]
    assert tr.stopped
    assert tr.final_state[0] == 21
    assert tr.times[-1] == tr.stop_time
    assert tr.final_time == 100.0


@pytest.mark.parametrize("engine", ["python", "numba"])
def test_initial_state_beyond_cap_stops_at_time_zero(engine):
    doc = bundled_model("birth_death")
    plan = _plan_for(doc, 5001)
    tr = simulate_exact(
        doc.network, [50], 10.0, plan.paths_for(0), stop_cap=10.0, engine=engine
    )
    assert tr.stopped and tr.stop_time == 0.0
    assert tr.event_count == 0
    assert tr.final_state.tolist() == [50]
