"""The closed-loop Markov chain, one probe atom per step.

Step order, which is also the reproducibility contract for the random
stream (one generator per trajectory, outcome draw first, then the
false-detection draw):

1. sample the true outcome from the physical state,
2. apply the back-action to the physical state,
3. flip the report with probability eta_f,
4. condition the estimator on the *reported* outcome,
5. compute the control from the estimator (switch on its pre-measurement
   distance, act on its post-measurement state),
6. inject the same displacement into the physical state and the estimator.

Detection errors therefore corrupt the estimator only; the physical
back-action always follows the true outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .feedback import FeedbackConfig, feedback_switched, lyapunov_v
from .filtering import FilterState, filter_init
from .fock import (
    FockOperators,
    apply_displacement,
    coherent_state,
    displacement,
    make_operators,
    validate_density,
)
from .measurement import (
    PROBABILITY_FLOOR,
    MeasurementModel,
    ZeroProbabilityOutcome,
    flip_outcome,
    make_measurement,
    mid_fringe_phi_r,
    outcome_probabilities,
    project,
    validate_phases,
)

__all__ = [
    "INITIAL_STATES",
    "ExperimentConfig",
    "LoopState",
    "TrajectoryRecord",
    "experiment_context",
    "validate_experiment",
    "initial_density",
    "init_loop",
    "step",
    "run_trajectory",
    "conditional_step_expectation",
]

INITIAL_STATES = ("coherent", "fock", "custom")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Everything that defines one closed-loop experiment.

    ``phi_r=None`` resolves to the mid-fringe setting for the target.
    ``feedback=None`` runs the loop open (alpha = 0 every step), which is
    how plain repeated measurement is simulated.  ``eta_f`` is the
    per-atom probability that the detector reports the wrong level.
    """

    n_max: int = 15
    n_bar: int = 3
    phi: float = 0.3
    phi_r: float | None = None
    feedback: FeedbackConfig | None = None
    eta_f: float = 0.0
    steps: int = 100
    filter_init: str = "matched"
    initial_state: str = "coherent"
    initial_fock: int = 0
    initial_state_matrix: np.ndarray | None = None
    filter_init_matrix: np.ndarray | None = None

    def resolved_phi_r(self) -> float:
        if self.phi_r is not None:
            return self.phi_r
        return mid_fringe_phi_r(self.phi, self.n_bar)


@dataclass(frozen=True, eq=False)
class LoopState:
    """Physical state and estimator, jointly, after ``step`` atoms."""

    rho: np.ndarray
    filter: FilterState
    step: int


@dataclass
class TrajectoryRecord:
    """Per-step log of one closed-loop trajectory.

    ``v_est`` is the estimator distance consumed by the branch switch this
    step (evaluated before the measurement).  ``overlap`` is
    tr(rho * rho_est) after the step, exposed so estimator forgetting can
    be studied.  ``filter_fallback`` flags the rare recovery where the
    reported outcome was impossible under the estimate and its opposite
    was used instead.
    """

    step: int
    true_outcome: str
    reported_outcome: str
    alpha: float
    fidelity_true: float
    fidelity_est: float
    v_est: float
    overlap: float
    filter_fallback: bool = False


def experiment_context(cfg: ExperimentConfig) -> tuple[FockOperators, MeasurementModel]:
    """Cached operators and measurement model for a configuration."""
    ops = make_operators(cfg.n_max)
    model = make_measurement(cfg.phi, cfg.resolved_phi_r(), cfg.n_max)
    return ops, model


def validate_experiment(cfg: ExperimentConfig, check_phases: bool = True) -> None:
    """Reject configurations the closed loop cannot run on.

    ``check_phases=False`` skips the phase non-degeneracy requirement; the
    certification tooling needs to construct degenerate models on purpose.
    """
    if not 0 <= cfg.n_bar <= cfg.n_max:
        raise ValueError(f"n_bar must lie in [0, n_max={cfg.n_max}], got {cfg.n_bar}")
    if not 0.0 <= cfg.eta_f <= 1.0:
        raise ValueError(f"eta_f must lie in [0, 1], got {cfg.eta_f}")
    if cfg.steps < 0:
        raise ValueError(f"steps must be non-negative, got {cfg.steps}")
    if cfg.feedback is not None and cfg.feedback.n_bar != cfg.n_bar:
        raise ValueError(
            f"feedback targets level {cfg.feedback.n_bar} but the experiment "
            f"targets {cfg.n_bar}"
        )
    if cfg.initial_state not in INITIAL_STATES:
        raise ValueError(
            f"initial_state must be one of {INITIAL_STATES}, got {cfg.initial_state!r}"
        )
    if cfg.initial_state == "fock" and not 0 <= cfg.initial_fock <= cfg.n_max:
        raise ValueError(f"initial_fock must lie in [0, {cfg.n_max}]")
    if cfg.initial_state == "custom":
        if cfg.initial_state_matrix is None:
            raise ValueError("initial_state 'custom' requires initial_state_matrix")
        validate_density(cfg.initial_state_matrix, name="initial state")
    if check_phases:
        _, model = experiment_context(cfg)
        report = validate_phases(model)
        if not report.valid:
            raise ValueError(
                "measurement phases do not separate the photon-number levels "
                f"({report.describe()}); the closed loop cannot distinguish them"
            )


def initial_density(cfg: ExperimentConfig, ops: FockOperators) -> np.ndarray:
    if cfg.initial_state == "coherent":
        return coherent_state(ops, cfg.n_bar)
    if cfg.initial_state == "fock":
        rho = np.zeros((ops.dim, ops.dim))
        rho[cfg.initial_fock, cfg.initial_fock] = 1.0
        return rho
    return np.array(cfg.initial_state_matrix, dtype=float)


def init_loop(cfg: ExperimentConfig) -> LoopState:
    ops, _ = experiment_context(cfg)
    rho0 = initial_density(cfg, ops)
    filt = filter_init(
        cfg.filter_init, rho0, cfg.n_max, custom_state=cfg.filter_init_matrix
    )
    return LoopState(rho0, filt, 0)


def step(
    state: LoopState, cfg: ExperimentConfig, rng: np.random.Generator
) -> tuple[LoopState, TrajectoryRecord]:
    """Advance the closed loop by one atom."""
    ops, model = experiment_context(cfg)
    rho = state.rho
    est = state.filter.rho_est

    p_g, _ = outcome_probabilities(rho, model)
    true_outcome = "g" if rng.random() < p_g else "e"
    rho_half = project(rho, true_outcome, model)

    flipped = rng.random() < cfg.eta_f
    reported = flip_outcome(true_outcome) if flipped else true_outcome

    fallback = False
    try:
        est_half = project(est, reported, model)
    except ZeroProbabilityOutcome:
        # The report is impossible under the estimate (only reachable from
        # pathological custom initializations); recover with the opposite
        # outcome and flag the step for audit.
        est_half = project(est, flip_outcome(reported), model)
        fallback = True

    v_pre = lyapunov_v(est, cfg.n_bar)
    if cfg.feedback is None:
        alpha = 0.0
    else:
        alpha = feedback_switched(v_pre, est_half, ops, cfg.feedback)

    if alpha == 0.0:
        rho_next, est_next = rho_half, est_half
    else:
        d = displacement(ops, alpha)
        rho_next = apply_displacement(rho_half, d)
        est_next = apply_displacement(est_half, d)

    k = state.step + 1
    record = TrajectoryRecord(
        step=k,
        true_outcome=true_outcome,
        reported_outcome=reported,
        alpha=float(alpha),
        fidelity_true=float(rho_next[cfg.n_bar, cfg.n_bar]),
        fidelity_est=float(est_next[cfg.n_bar, cfg.n_bar]),
        v_est=float(v_pre),
        overlap=float((rho_next * est_next).sum()),
        filter_fallback=fallback,
    )
    next_state = LoopState(rho_next, FilterState(est_next, state.filter.init_kind), k)
    return next_state, record


def run_trajectory(cfg: ExperimentConfig, seed: int) -> list[TrajectoryRecord]:
    """Simulate one trajectory; bit-identical records for identical inputs."""
    validate_experiment(cfg)
    rng = np.random.default_rng(seed)
    state = init_loop(cfg)
    records = []
    for _ in range(cfg.steps):
        state, record = step(state, cfg, rng)
        records.append(record)
    return records


AlphaPolicy = Callable[[str, np.ndarray, np.ndarray], float]


def conditional_step_expectation(
    rho: np.ndarray,
    rho_est: np.ndarray,
    alpha_policy: AlphaPolicy,
    model: MeasurementModel,
    ops: FockOperators,
    n_bar: int,
    floor: float = PROBABILITY_FLOOR,
) -> tuple[float, float]:
    """Exact one-step conditional expectations, with no sampling.

    Enumerates both outcomes weighted by the *true* state's probabilities,
    applies ``alpha_policy(outcome, rho_half, est_half)`` on each branch,
    and returns E[V(rho')] and E[tr(rho' rho_est')].  Branches whose true
    probability falls below ``floor`` contribute nothing.
    """
    e_v = 0.0
    e_overlap = 0.0
    for outcome, prob in zip(("g", "e"), outcome_probabilities(rho, model)):
        if prob < floor:
            continue
        rho_half = project(rho, outcome, model, floor=floor)
        est_half = project(rho_est, outcome, model, floor=floor)
        alpha = float(alpha_policy(outcome, rho_half, est_half))
        if alpha == 0.0:
            rho_next, est_next = rho_half, est_half
        else:
            d = displacement(ops, alpha)
            rho_next = apply_displacement(rho_half, d)
            est_next = apply_displacement(est_half, d)
        e_v += prob * lyapunov_v(rho_next, n_bar)
        e_overlap += prob * float((rho_next * est_next).sum())
    return e_v, e_overlap
