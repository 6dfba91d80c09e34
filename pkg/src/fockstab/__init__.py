"""Measurement-based feedback stabilization of cavity photon-number states.

A discrete-time simulator for the closed loop formed by dispersive atomic
readout of a microwave cavity, a state estimator driven by the detector
reports, and a switched Lyapunov feedback that injects small coherent
pulses; together with a certification suite that checks the inequalities
the convergence argument relies on.
"""

from .feedback import (
    FeedbackConfig,
    commutator_gain,
    default_gain,
    drift_term,
    feedback_argmax,
    feedback_linear,
    feedback_switched,
    lyapunov_v,
    lyapunov_w,
)
from .filtering import FilterState, filter_init, filter_update
from .fock import (
    FockOperators,
    apply_displacement,
    coherent_state,
    displacement,
    fidelity,
    make_operators,
    validate_density,
)
from .measurement import (
    MeasurementModel,
    PhaseReport,
    ZeroProbabilityOutcome,
    make_measurement,
    mid_fringe_phi_r,
    outcome_probabilities,
    project,
    validate_phases,
)
from .ensemble import EnsembleStats, mix_seed, run_ensemble, welford_merge, welford_partial
from .trajectory import (
    ExperimentConfig,
    LoopState,
    TrajectoryRecord,
    conditional_step_expectation,
    init_loop,
    run_trajectory,
    step,
)
from .verify import (
    CheckReport,
    check_contraction,
    check_lyapunov_increase,
    check_martingale,
    check_phase_conditions,
    check_povm,
    check_rank_controllability,
    random_density,
    run_all_checks,
)
from .config import ConfigError, default_config, experiment_to_dict, resolve_config

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ConfigError",
    "EnsembleStats",
    "ExperimentConfig",
    "FeedbackConfig",
    "FilterState",
    "FockOperators",
    "LoopState",
    "MeasurementModel",
    "PhaseReport",
    "TrajectoryRecord",
    "ZeroProbabilityOutcome",
    "apply_displacement",
    "check_contraction",
    "check_lyapunov_increase",
    "check_martingale",
    "check_phase_conditions",
    "check_povm",
    "check_rank_controllability",
    "coherent_state",
    "commutator_gain",
    "conditional_step_expectation",
    "default_config",
    "default_gain",
    "displacement",
    "drift_term",
    "experiment_to_dict",
    "feedback_argmax",
    "feedback_linear",
    "feedback_switched",
    "fidelity",
    "filter_init",
    "filter_update",
    "init_loop",
    "lyapunov_v",
    "lyapunov_w",
    "make_measurement",
    "make_operators",
    "mid_fringe_phi_r",
    "mix_seed",
    "outcome_probabilities",
    "project",
    "random_density",
    "resolve_config",
    "run_all_checks",
    "run_ensemble",
    "run_trajectory",
    "step",
    "validate_density",
    "validate_phases",
    "welford_merge",
    "welford_partial",
]
