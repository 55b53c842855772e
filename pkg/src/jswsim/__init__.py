"""Simulation and verification toolkit for parallel queues where each
arrival joins the queue with the P-th least workload (P=1 is
join-the-shortest-workload).

The public surface re-exported here:

- profile arithmetic and the one-step workload recursion (`pth_step`),
- partial orderings on profiles and randomized closure-property suites,
- reproducible mark generation (iid, Markov-modulated, trace),
- backward stationary-profile estimation,
- coupled-path dominance checks between systems.
"""

from .comparison import (
    ComparisonReport,
    EcdfDominance,
    StepViolation,
    SystemConfig,
    Trajectory,
    compare_allocation_ranks,
    compare_server_counts,
    ecdf_dominance,
    fcfs_waiting_times,
    run_trajectory,
    write_trajectory_csv,
    write_violations_csv,
)
from .config import ExperimentConfig, load_config, parse_law, parse_seeds
from .errors import ConfigError, InputError, PremiseError, StabilityError
from .loynes import LoynesResult, backward_marks, estimate_stationary, loynes_iterate
from .orderings import (
    PropertySuiteReport,
    OrderVerdict,
    Violation,
    check_clamp_insert_stability,
    check_negation_symmetry,
    check_shift_monotonicity,
    check_sorted_difference_balance,
    check_step_comparison,
    convex_symmetric_battery,
    prec,
    prec_p,
    prec_star,
    run_property_suite,
    schur_convex_leq,
    suite_names,
)
from .processes import (
    RNG_ALGORITHM,
    Deterministic,
    Exponential,
    Hyperexponential,
    IIDModel,
    InputModel,
    MarkovModulatedModel,
    MarkSequence,
    StabilityVerdict,
    TraceModel,
    Uniform,
    generate,
    mean_sigma,
    mean_xi,
    model_label,
    stability_check,
)
from .profiles import (
    Mark,
    Profile,
    kw_step,
    offered_wait,
    pad,
    pth_step,
    sort_ascending,
    total_workload,
    zero_profile,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ConfigError",
    "Deterministic",
    "EcdfDominance",
    "ExperimentConfig",
    "Exponential",
    "Hyperexponential",
    "IIDModel",
    "InputError",
    "InputModel",
    "LoynesResult",
    "Mark",
    "MarkSequence",
    "MarkovModulatedModel",
    "OrderVerdict",
    "PremiseError",
    "Profile",
    "PropertySuiteReport",
    "RNG_ALGORITHM",
    "StabilityError",
    "StabilityVerdict",
    "StepViolation",
    "SystemConfig",
    "TraceModel",
    "Trajectory",
    "Uniform",
    "Violation",
    "backward_marks",
    "check_clamp_insert_stability",
    "check_negation_symmetry",
    "check_shift_monotonicity",
    "check_sorted_difference_balance",
    "check_step_comparison",
    "compare_allocation_ranks",
    "compare_server_counts",
    "convex_symmetric_battery",
    "ecdf_dominance",
    "estimate_stationary",
    "fcfs_waiting_times",
    "generate",
    "kw_step",
    "load_config",
    "loynes_iterate",
    "mean_sigma",
    "mean_xi",
    "model_label",
    "offered_wait",
    "pad",
    "parse_law",
    "parse_seeds",
    "prec",
    "prec_p",
    "prec_star",
    "pth_step",
    "run_property_suite",
    "run_trajectory",
    "schur_convex_leq",
    "sort_ascending",
    "stability_check",
    "suite_names",
    "total_workload",
    "write_trajectory_csv",
    "write_violations_csv",
    "zero_profile",
]
