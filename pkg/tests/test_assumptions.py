import numpy as np
import pytest

from splitssa import (
    Custom,
    MassAction,
    ReactionNetwork,
    WeightVector,
    bundled_model,
    evaluate_propensity,
    fit_assumption_constants,
    weighted_norm,
)
from splitssa.assumptions import ScanBudgetExceeded


def exhaustive_drift_scan(net, max_x):
    # independent oracle: direct evaluation of -l^T N w(x) on the ball
    l = np.ones(net.species_count)
    lN = l @ net.stoich
    worst = []
    for x in range(max_x + 1):
        s = np.array([x])
        w = np.array([evaluate_propensity(net, r, s) for r in range(net.channel_count)])
        worst.append(float(-(lN @ w)))
    return np.array(worst)


def test_birth_death_recovers_known_constants():
    net = bundled_model("birth_death").network
    rep = fit_assumption_constants(net, WeightVector.ones(1), 1000.0)
    # oracle scan: drift = k - mu*x on 0..1000, so the tight affine bound
    # is A=k, alpha=-mu
    drift = exhaustive_drift_scan(net, 1000)
    assert np.all(drift <= rep.A + rep.alpha * np.arange(1001) + 1e-9)
    assert rep.A == pytest.approx(5.0)
    assert rep.alpha <= -0.05 + 1e-9
    assert rep.beta1 == pytest.approx(0.025)
    assert rep.lipschitz[1] == pytest.approx(0.05)
    assert rep.holds()


def test_pure_birth_constants():
    net = ReactionNetwork(np.array([[-1]]), (MassAction(7.0, (0,)),))
    rep = fit_assumption_constants(net, WeightVector.ones(1), 200.0)
    assert rep.A == pytest.approx(7.0)
    assert rep.alpha == pytest.approx(0.0)
    assert np.all(rep.lipschitz == 0.0)


def test_dimerization_alpha_zero():
    net = bundled_model("dimerization").network
    rep = fit_assumption_constants(net, WeightVector.ones(1), 1000.0)
    assert rep.alpha == pytest.approx(0.0, abs=1e-12)
    assert rep.beta2 == pytest.approx(5e-4, rel=0.05)
    assert rep.holds()


def test_fit_reverified_on_all_points_2d():
    net = bundled_model("bimolecular").network
    l = WeightVector(np.array([1.0, 2.0]))
    P = 60.0
    rep = fit_assumption_constants(net, l, P)
    assert rep.holds()
    # manual re-verification, point by point
    lN = l.weights @ net.stoich
    for x1 in range(0, 61):
        for x2 in range(0, 31):
            x = np.array([x1, x2])
            n = weighted_norm(x, l)
            if n > P:
                continue
            w = np.array([evaluate_propensity(net, r, x) for r in range(3)])
            assert -(lN @ w) <= rep.A + rep.alpha * n + 1e-9
            assert (lN**2) @ w / 2 <= rep.B + rep.beta1 * n + rep.beta2 * n**2 + 1e-9


def test_custom_propensity_scanned():
    net = ReactionNetwork(
        np.array([[1]]),
        (Custom(lambda x: 0.25 * x[0]),),
    )
    rep = fit_assumption_constants(net, WeightVector.ones(1), 100.0)
    assert rep.lipschitz[0] == pytest.approx(0.25)
    assert rep.holds()


def test_scan_budget_guard():
    net = bundled_model("bimolecular").network
    with pytest.raises(ScanBudgetExceeded):
        fit_assumption_constants(net, WeightVector.ones(2), 1e6, max_points=10_000)
