"""Dissipativity and Lipschitz diagnostics for the bundled models.

Scans each model on a lattice ball and fits the constants that certify
well-posedness of the dynamics (and of a chosen split).
"""

from splitssa import WeightVector, bundled_model, fit_assumption_constants

for name in ("birth_death", "dimerization", "illposed"):
    doc = bundled_model(name)
    rep = fit_assumption_constants(doc.network, WeightVector.ones(1), 400.0)
    print(f"{name:12s} A={rep.A:8.3f} alpha={rep.alpha:+.4f} B={rep.B:8.3f} "
          f"beta1={rep.beta1:.4f} beta2={rep.beta2:.2e}")
    print(f"{'':12s} per-channel Lipschitz constants: "
          + ", ".join(f"{L:.3g}" for L in rep.lipschitz))
    print(f"{'':12s} inequalities verified on {rep.points_scanned} lattice points: {rep.holds()}")
