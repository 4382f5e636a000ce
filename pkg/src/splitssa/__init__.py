"""splitssa: path-wise exact and split-step simulation of stochastic kinetics.

The package simulates continuous-time Markov chains of chemical kinetics
two ways on shared randomness: exactly, through the random time change
construction, and with first/second-order split-step methods driven by a
square-wave switching kernel.  Because both simulators consume the same
per-channel Poisson arrival streams, their trajectories are coupled
path-wise and the splitting error can be measured directly, sample by
sample, down to arbitrarily small step sizes.
"""

from .assumptions import AssumptionReport, fit_assumption_constants
from .engine import ChannelClock, EventBudgetExceeded, reactivate_channel
from .exact import simulate_exact
from .kernel import KernelSpec, SplitSchedule, kernel_integral, kernel_value, switch_schedule
from .modelio import (
    ModelDocument,
    bundled_model,
    bundled_model_names,
    load_model,
    load_model_file,
    register_custom_form,
    save_model_file,
)
from .network import (
    Custom,
    InfeasibleFiringError,
    MassAction,
    ReactionNetwork,
    SplitPartition,
    State,
    WeightVector,
    apply_channel,
    as_state,
    evaluate_propensity,
    weighted_norm,
)
from .paths import PoissonPath, StreamSeedPlan, derive_path, dump_arrivals
from .spatial import Mesh, SpatialModel, flatten, line_mesh, reaction_diffusion_partition
from .splitstep import simulate_split
from .stats import (
    OBSERVABLES,
    ConvergenceTable,
    CoupledSamplingError,
    ErrorEstimate,
    StudyResult,
    TimewiseResult,
    WeakErrorEstimate,
    coupled_study,
    error_vs_time_study,
    fit_order,
    kernel_weighted_integral,
    strong_error,
    trajectory_variation,
    weak_error,
)
from .trajectory import Trajectory, state_at, states_on_grid

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "fit_assumption_constants",
    "ChannelClock",
    "EventBudgetExceeded",
    "reactivate_channel",
    "simulate_exact",
    "KernelSpec",
    "SplitSchedule",
    "kernel_integral",
    "kernel_value",
    "switch_schedule",
    "ModelDocument",
    "bundled_model",
    "bundled_model_names",
    "load_model",
    "load_model_file",
    "register_custom_form",
    "save_model_file",
    "Custom",
    "InfeasibleFiringError",
    "MassAction",
    "ReactionNetwork",
    "SplitPartition",
    "State",
    "WeightVector",
    "apply_channel",
    "as_state",
    "evaluate_propensity",
    "weighted_norm",
    "PoissonPath",
    "StreamSeedPlan",
    "derive_path",
    "dump_arrivals",
    "Mesh",
    "SpatialModel",
    "flatten",
    "line_mesh",
    "reaction_diffusion_partition",
    "simulate_split",
    "OBSERVABLES",
    "ConvergenceTable",
    "CoupledSamplingError",
    "ErrorEstimate",
    "StudyResult",
    "TimewiseResult",
    "WeakErrorEstimate",
    "coupled_study",
    "error_vs_time_study",
    "fit_order",
    "kernel_weighted_integral",
    "strong_error",
    "trajectory_variation",
    "weak_error",
    "Trajectory",
    "state_at",
    "states_on_grid",
]
