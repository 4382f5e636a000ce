"""One pair of coupled runs: exact vs split-step on the same noise.

The two simulators consume the same per-channel Poisson arrival streams, so
their difference is the splitting error alone, not Monte Carlo noise.  Run:

    python demos/01_coupled_trajectories.py
"""

import numpy as np

from splitssa import KernelSpec, StreamSeedPlan, bundled_model, simulate_exact, simulate_split, states_on_grid

doc = bundled_model("birth_death")
net, split, x0 = doc.network, doc.split, doc.initial_state
plan = StreamSeedPlan(ensemble_seed=7, channel_count=net.channel_count)

paths = plan.paths_for(0)
exact = simulate_exact(net, x0, 100.0, paths)
coarse = simulate_split(net, split, KernelSpec.lie(2.0), x0, 100.0, paths)
fine = simulate_split(net, split, KernelSpec.lie(0.25), x0, 100.0, paths)

grid = np.arange(0.0, 101.0, 10.0)
rows = zip(
    grid,
    states_on_grid(exact, net, grid)[:, 0],
    states_on_grid(coarse, net, grid)[:, 0],
    states_on_grid(fine, net, grid)[:, 0],
)
print(f"{'t':>5} {'exact':>6} {'h=2':>6} {'h=1/4':>6}")
for t, a, b, c in rows:
    print(f"{t:5.0f} {a:6d} {b:6d} {c:6d}")

print(f"\nevents: exact {exact.event_count}, split h=2 {coarse.event_count}, "
      f"split h=1/4 {fine.event_count}")
print("the coarse split drifts visibly within a period; the fine split hugs the exact path")
