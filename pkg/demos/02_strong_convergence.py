"""Small strong-convergence study (reduced samples; see the CLI for full runs).

Measures E|Y - X|^2 at t=100 for a range of step sizes, prints the table and
the fitted orders.  The mean-square error scales like h, i.e. RMS order 1/2.
"""

from splitssa import StreamSeedPlan, bundled_model, coupled_study

doc = bundled_model("birth_death")
plan = StreamSeedPlan(ensemble_seed=42, channel_count=2)
hs = (1.0, 0.5, 0.25, 0.125, 0.0625)

res = coupled_study(
    doc.network, doc.split, doc.initial_state, 100.0, 1500, plan,
    h_values=hs, methods=("lie", "strang"),
)

print(f"{'h':>8} {'M (lie)':>12} {'+-':>8} {'M (strang)':>12}")
for i, h in enumerate(hs):
    lie = res.strong["lie"].estimates[i]
    strang = res.strong["strang"].estimates[i]
    print(f"{h:8.4f} {lie.mean:12.4f} {2*lie.half_width:8.4f} {strang.mean:12.5f}")

print(f"\nlie   : mean-square slope {res.strong['lie'].fit_order():.3f}"
      f"  -> strong (RMS) order {res.strong['lie'].strong_order():.3f}")
print(f"strang: mean-square slope {res.strong['strang'].fit_order():.3f}"
      f"  -> strong (RMS) order {res.strong['strang'].strong_order():.3f}")
