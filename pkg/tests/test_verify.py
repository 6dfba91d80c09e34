import math

import numpy as np
import pytest

from fockstab import (
    check_contraction,
    check_lyapunov_increase,
    check_martingale,
    check_phase_conditions,
    check_povm,
    check_rank_controllability,
    default_config,
    make_measurement,
    random_density,
    run_all_checks,
)
from conftest import N_BAR, N_MAX, fock_density


class TestRandomDensity:
    def test_unit_trace(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            rho = random_density(rng, N_MAX)
            assert abs(np.trace(rho) - 1.0) <= 1e-12

    def test_full_rank_by_default(self):
        rho = random_density(np.random.default_rng(1), N_MAX)
        assert np.linalg.eigvalsh(rho)[0] > 0.0

    def test_rank_one_is_pure(self):
        rho = random_density(np.random.default_rng(2), N_MAX, rank=1)
        assert float((rho * rho).sum()) == pytest.approx(1.0, abs=1e-10)

    def test_symmetric(self):
        rho = random_density(np.random.default_rng(3), N_MAX, rank=4)
        assert np.array_equal(rho, rho.T)

    def test_rank_bounds(self):
        with pytest.raises(ValueError):
            random_density(np.random.default_rng(0), N_MAX, rank=0)
        with pytest.raises(ValueError):
            random_density(np.random.default_rng(0), N_MAX, rank=17)


class TestPovmCheck:
    def test_reference_model(self, model):
        report = check_povm(model)
        assert report.passed
        assert report.max_violation <= 1e-14

    def test_any_phases_pass(self):
        for phi, phi_r in [(0.0, 0.0), (1.1, -2.3), (math.pi, 0.4)]:
            assert check_povm(make_measurement(phi, phi_r, N_MAX)).passed

    def test_zero_threshold_fails_by_rounding(self, model):
        # cos^2 + sin^2 lands within one ulp of 1, but not exactly on it
        # for every phase; a zero threshold documents that this is float
        # rounding, not a modeling error.
        report = check_povm(model, threshold=0.0)
        assert not report.passed
        assert report.max_violation <= 1e-15


class TestMartingaleCheck:
    def test_reference_model(self, model):
        report = check_martingale(model, N_BAR, 1000, np.random.default_rng(5))
        assert report.passed
        assert report.max_violation <= 1e-10

    def test_target_state_exact(self, model):
        from fockstab import fidelity, outcome_probabilities, project

        rho = fock_density(N_BAR)
        p_g, p_e = outcome_probabilities(rho, model)
        value = p_g * fidelity(project(rho, "g", model), N_BAR)
        value += p_e * fidelity(project(rho, "e", model), N_BAR)
        assert value == pytest.approx(1.0, abs=1e-14)


class TestLyapunovIncreaseCheck:
    def test_reference_model(self, model, fb):
        report = check_lyapunov_increase(model, fb, 500, np.random.default_rng(6))
        assert report.passed
        assert report.max_violation <= 1e-8

    def test_diagonal_states_have_zero_drift(self, ops, model, fb):
        from fockstab import drift_term

        assert drift_term(np.eye(16) / 16.0, ops, fb.n_bar) == 0.0


class TestContractionCheck:
    def test_reference_model(self, model):
        report = check_contraction(
            model, 300, np.random.default_rng(7), alphas=(0.0, 0.1, -0.1)
        )
        assert report.passed
        assert report.trials == 900
        assert report.max_violation <= 1e-10

    def test_pure_target_pair_is_fixed(self, ops, model):
        from fockstab import conditional_step_expectation

        rho = fock_density(N_BAR)
        _, e_overlap = conditional_step_expectation(
            rho, rho, lambda *_: 0.0, model, ops, N_BAR
        )
        assert e_overlap >= 1.0 - 1e-12


class TestRankCheck:
    @pytest.mark.parametrize("n_bar", range(6))
    def test_full_rank_for_all_targets(self, ops, n_bar):
        report = check_rank_controllability(ops, n_bar)
        assert report.passed

    def test_orthonormalized_family_gives_same_verdict(self, ops):
        # Rank is basis independent: QR-orthonormalizing the scaled family
        # must not change the outcome.
        dim = 16
        cols = np.empty((dim, dim))
        v = np.zeros(dim)
        v[N_BAR] = 1.0
        cols[:, 0] = v
        for j in range(1, dim):
            v = ops.q @ v
            v /= np.linalg.norm(v)
            cols[:, j] = v
        q_mat, _ = np.linalg.qr(cols)
        sigma = np.linalg.svd(q_mat, compute_uv=False)
        assert sigma[-1] / sigma[0] > 1e-10
        assert check_rank_controllability(ops, N_BAR).passed


class TestPhaseCheck:
    def test_reference_model_passes(self, model):
        assert check_phase_conditions(model).passed

    def test_constant_phase_fails(self):
        assert not check_phase_conditions(make_measurement(0.0, 0.7, N_MAX)).passed


class TestRunAllChecks:
    def test_reference_configuration_all_pass(self):
        reports = run_all_checks(default_config(), 200, seed=11)
        assert len(reports) == 6
        assert all(r.passed for r in reports)

    def test_degenerate_phases_fail_only_the_phase_check(self):
        from fockstab.config import resolve_config

        cfg, _ = resolve_config({"phi": 0.0}, check_phases=False)
        reports = run_all_checks(cfg, 100, seed=11)
        by_name = {r.name: r for r in reports}
        assert not by_name["phase_conditions"].passed
        for name, report in by_name.items():
            if name != "phase_conditions":
                assert report.passed, name

    def test_repeating_seed_reproduces_reports(self):
        cfg = default_config()
        first = run_all_checks(cfg, 150, seed=3)
        second = run_all_checks(cfg, 150, seed=3)
        assert first == second
