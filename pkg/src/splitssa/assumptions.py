"""Scan-based fitting of the dissipativity/Lipschitz constants of a network.

For a weight vector ``l`` the diagnostics scan every lattice state with
``l^T x <= P`` and fit constants such that, on the whole scanned ball,

    (i)   -l^T N w(x)          <=  A + alpha * |x|_l
    (ii)  (l^T N)^2 w(x) / 2   <=  B + beta1 * |x|_l + beta2 * |x|_l^2
    (iii) |w_r(x) - w_r(y)|    <=  L_r * |x - y|         (unit-step neighbors)

with ``A, B, beta1, beta2, L_r >= 0`` (``alpha`` may be negative).  The
fits are intentionally tight in specific ways:

* (i) pins ``A`` to the maximum of the drift functional (clamped at 0) and
  then takes the smallest admissible slope, so an affine drift is recovered
  exactly and superlinear decay yields ``alpha = 0`` rather than a
  scan-size-dependent negative slope.
* (ii) is a non-negative least-squares fit on ``[1, n, n^2]`` shifted up by
  the largest residual, so polynomial intensity functionals are recovered
  exactly.
* (iii) is the maximum finite difference over scanned unit-step neighbor
  pairs.

There is no symbolic shortcut: custom propensities are handled by the same
scan.  The scan is exhaustive, so the dimension/radius must stay small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .network import ReactionNetwork, WeightVector, evaluate_propensity

__all__ = ["AssumptionReport", "fit_assumption_constants", "ScanBudgetExceeded"]


class ScanBudgetExceeded(RuntimeError):
    """The lattice ball has more points than the scan budget allows."""


@dataclass(frozen=True)
class AssumptionReport:
    """Fitted constants plus scan metadata; see module docstring."""

    A: float
    alpha: float
    B: float
    beta1: float
    beta2: float
    lipschitz: np.ndarray
    norm_cap: float
    points_scanned: int
    max_drift_violation: float
    max_intensity_violation: float

    def holds(self, tol: float = 1e-9) -> bool:
        """Whether both fitted inequalities held on every scanned point."""
        return self.max_drift_violation <= tol and self.max_intensity_violation <= tol


def _lattice_ball(weights: np.ndarray, P: float, budget: int) -> np.ndarray:
    """All lattice points with ``weights @ x <= P``, as an (n, D) array."""
    D = weights.shape[0]
    caps = np.floor(P / weights).astype(np.int64)
    est = np.prod(caps + 1.0)
    if est > budget * 8.0:
        raise ScanBudgetExceeded(
            f"lattice box has ~{est:.3g} points; reduce P or the dimension"
        )
    grids = np.meshgrid(*(np.arange(c + 1) for c in caps), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    pts = pts[pts @ weights <= P]
    if pts.shape[0] > budget:
        raise ScanBudgetExceeded(f"{pts.shape[0]} lattice points exceed budget {budget}")
    return pts


def fit_assumption_constants(
    network: ReactionNetwork,
    l: WeightVector,
    P: float,
    *,
    max_points: int = 2_000_000,
) -> AssumptionReport:
    """Fit the scan-verified constants on the ball ``l^T x <= P``.

    Raises :class:`ScanBudgetExceeded` when the ball is too large to
    enumerate; the scan is practical for up to three species.
    """
    if P <= 0:
        raise ValueError("P must be positive")
    if len(l) != network.species_count:
        raise ValueError("weight vector dimension mismatch")
    w = l.weights
    pts = _lattice_ball(w, float(P), max_points)
    n_pts = pts.shape[0]
    R = network.channel_count

    norms = pts @ w
    lN = w @ network.stoich  # row vector l^T N, one entry per channel
    props = np.empty((n_pts, R))
    for j in range(n_pts):
        x = pts[j]
        for r in range(R):
            props[j, r] = evaluate_propensity(network, r, x)

    drift = props @ (-lN)  # -l^T N w(x)
    intensity = props @ (lN**2) / 2.0

    # (i): A at the drift maximum, then the smallest admissible slope.
    A = float(max(drift.max(), 0.0))
    pos = norms > 0
    alpha = float(((drift[pos] - A) / norms[pos]).max()) if pos.any() else 0.0
    drift_viol = float((drift - (A + alpha * norms)).max())

    # (ii): NNLS on [1, n, n^2], shifted into an upper bound.
    design = np.stack([np.ones_like(norms), norms, norms**2], axis=1)
    coef, _ = nnls(design, intensity)
    B, beta1, beta2 = (float(c) for c in coef)
    shortfall = intensity - design @ coef
    B += float(max(shortfall.max(), 0.0))
    intensity_viol = float((intensity - (B + beta1 * norms + beta2 * norms**2)).max())

    # (iii): max finite difference along unit steps inside the ball.
    lipschitz = np.zeros(R)
    index_of = {tuple(p): j for j, p in enumerate(pts)}
    D = network.species_count
    for j in range(n_pts):
        x = pts[j]
        for d in range(D):
            nb = index_of.get(tuple(x + np.eye(D, dtype=np.int64)[d]))
            if nb is not None:
                diff = np.abs(props[nb] - props[j])
                np.maximum(lipschitz, diff, out=lipschitz)

    return AssumptionReport(
        A=A,
        alpha=alpha,
        B=B,
        beta1=beta1,
        beta2=beta2,
        lipschitz=lipschitz,
        norm_cap=float(P),
        points_scanned=n_pts,
        max_drift_violation=drift_viol,
        max_intensity_violation=intensity_viol,
    )
