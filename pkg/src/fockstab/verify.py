"""Numerical certification of the properties the closed-loop design rests on.

Each check evaluates one inequality (or algebraic identity) over randomized
inputs with *exact* two-outcome enumeration wherever an expectation appears,
so no sampling error enters the violation metric.  A report passes iff its
worst violation stays within the stated threshold; a negative violation is
simply margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feedback import FeedbackConfig, default_gain, drift_term
from .fock import (
    FockOperators,
    apply_displacement,
    displacement,
    fidelity,
    make_operators,
    resymmetrize,
)
from .measurement import (
    MeasurementModel,
    make_measurement,
    outcome_probabilities,
    project,
    validate_phases,
)
from .trajectory import ExperimentConfig, conditional_step_expectation, experiment_context

__all__ = [
    "CheckReport",
    "random_density",
    "check_povm",
    "check_martingale",
    "check_lyapunov_increase",
    "check_contraction",
    "check_rank_controllability",
    "check_phase_conditions",
    "run_all_checks",
]


@dataclass(frozen=True)
class CheckReport:
    name: str
    trials: int
    max_violation: float
    threshold: float
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name:<24} {self.trials:>6}  {self.max_violation:>12.3e}  "
            f"{self.threshold:>9.1e}  {verdict}"
        )


def _report(name: str, trials: int, max_violation: float, threshold: float) -> CheckReport:
    return CheckReport(
        name=name,
        trials=trials,
        max_violation=float(max_violation),
        threshold=float(threshold),
        passed=bool(max_violation <= threshold),
    )


def random_density(
    rng: np.random.Generator, n_max: int, rank: int | None = None
) -> np.ndarray:
    """Wishart-type random state: G G^T / tr(G G^T) with G standard normal.

    ``rank=None`` draws a full-rank state; ``rank=r`` restricts G to r
    columns (r=1 gives a random pure state).
    """
    dim = n_max + 1
    r = dim if rank is None else int(rank)
    if not 1 <= r <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = rng.standard_normal((dim, r))
    return resymmetrize(g @ g.T)


def check_povm(model: MeasurementModel, threshold: float = 1e-14) -> CheckReport:
    """Completeness of the detection pair: m_g^2 + m_e^2 = identity."""
    resolution = model.m_g @ model.m_g + model.m_e @ model.m_e
    violation = np.abs(resolution - np.eye(model.dim)).max()
    return _report("povm_completeness", 1, violation, threshold)


def check_martingale(
    model: MeasurementModel,
    n_bar: int,
    trials: int,
    rng: np.random.Generator,
    threshold: float = 1e-10,
) -> CheckReport:
    """The measurement alone moves the target population only on average:
    p_g * f(rho|g) + p_e * f(rho|e) equals f(rho) exactly."""
    worst = 0.0
    for _ in range(trials):
        rho = random_density(rng, model.n_max)
        p_g, p_e = outcome_probabilities(rho, model)
        expected = p_g * fidelity(project(rho, "g", model), n_bar)
        expected += p_e * fidelity(project(rho, "e", model), n_bar)
        worst = max(worst, abs(expected - fidelity(rho, n_bar)))
    return _report("martingale_identity", trials, worst, threshold)


def check_lyapunov_increase(
    model: MeasurementModel,
    cfg: FeedbackConfig,
    trials: int,
    rng: np.random.Generator,
    threshold: float = 1e-8,
    gain: float = 1e-3,
) -> CheckReport:
    """Small-gain guarantee of the proportional law.

    For alpha = gain * drift the displaced target population gains at least
    (gain/2) * drift^2, checked over random states whose target population
    exceeds the switching threshold (where this branch is active).
    """
    ops = make_operators(model.n_max)
    worst = 0.0
    produced = 0
    attempts = 0
    max_attempts = 1000 * trials
    while produced < trials:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(
                "could not draw enough states with target population above "
                f"{cfg.epsilon} after {max_attempts} attempts"
            )
        rho = random_density(rng, model.n_max)
        if fidelity(rho, cfg.n_bar) <= cfg.epsilon:
            continue
        produced += 1
        delta = drift_term(rho, ops, cfg.n_bar)
        alpha = gain * delta
        displaced = apply_displacement(rho, displacement(ops, alpha))
        lhs = fidelity(displaced, cfg.n_bar) - fidelity(rho, cfg.n_bar)
        rhs = 0.5 * gain * delta * delta
        worst = max(worst, rhs - lhs)
    return _report("lyapunov_increase", trials, max(0.0, worst), threshold)


def check_contraction(
    model: MeasurementModel,
    trials: int,
    rng: np.random.Generator,
    alphas: tuple[float, ...] = (0.0, 0.1, -0.1),
    threshold: float = 1e-10,
) -> CheckReport:
    """Estimator overlap never shrinks in expectation, for any control.

    For random pairs (rho, full-rank rho_est) and each fixed alpha, the
    exact two-outcome expectation of tr(rho' rho_est') must stay above
    tr(rho rho_est).
    """
    ops = make_operators(model.n_max)
    worst = 0.0
    count = 0
    for _ in range(trials):
        rank = int(rng.integers(1, model.dim + 1))
        rho = random_density(rng, model.n_max, rank=rank)
        rho_est = random_density(rng, model.n_max)
        before = float((rho * rho_est).sum())
        for alpha in alphas:
            policy = lambda outcome, rho_half, est_half, a=alpha: a
            _, e_overlap = conditional_step_expectation(
                rho, rho_est, policy, model, ops, n_bar=0
            )
            worst = max(worst, before - e_overlap)
            count += 1
    return _report("filter_contraction", count, max(0.0, worst), threshold)


def check_rank_controllability(
    ops: FockOperators, n_bar: int, min_ratio: float = 1e-10
) -> CheckReport:
    """Full rank of the displacement orbit directions at the target.

    Builds the family q^j |n_bar> for j = 0..n_max with each power
    normalized before the next application (raw powers grow like
    sqrt(n_max)^j and would drown the singular-value test in conditioning
    artifacts), then requires sigma_min/sigma_max above ``min_ratio``.
    """
    dim = ops.dim
    cols = np.empty((dim, dim))
    v = np.zeros(dim)
    v[n_bar] = 1.0
    cols[:, 0] = v
    for j in range(1, dim):
        v = ops.q @ v
        v = v / np.linalg.norm(v)
        cols[:, j] = v
    sigma = np.linalg.svd(cols, compute_uv=False)
    ratio = float(sigma[-1] / sigma[0])
    return _report("rank_controllability", 1, min_ratio - ratio, 0.0)


def check_phase_conditions(model: MeasurementModel, margin: float = 1e-9) -> CheckReport:
    """Phase non-degeneracy, folded into the report format: the violation is
    how far the worst phase distance falls short of the margin."""
    phase_report = validate_phases(model, margin=margin)
    shortfall = margin - min(
        phase_report.min_level_distance, phase_report.min_pair_distance
    )
    return _report("phase_conditions", model.dim, shortfall, 0.0)


def run_all_checks(
    cfg: ExperimentConfig, trials: int, seed: int
) -> list[CheckReport]:
    """Run the whole certification battery; deterministic given ``seed``."""
    from .ensemble import mix_seed

    ops, model = experiment_context(cfg)
    fb = cfg.feedback
    if fb is None:
        fb = FeedbackConfig(
            n_bar=cfg.n_bar,
            c1=default_gain(cfg.n_bar),
            epsilon=0.1,
            alpha_bar=0.1,
        )
    reports = [
        check_povm(model),
        check_martingale(model, cfg.n_bar, trials, np.random.default_rng(mix_seed(seed, 1))),
        check_lyapunov_increase(model, fb, trials, np.random.default_rng(mix_seed(seed, 2))),
        check_contraction(model, trials, np.random.default_rng(mix_seed(seed, 3))),
        check_rank_controllability(ops, cfg.n_bar),
        check_phase_conditions(model),
    ]
    return reports
