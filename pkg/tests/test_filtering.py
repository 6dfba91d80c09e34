import numpy as np
import pytest

from fockstab import (
    ZeroProbabilityOutcome,
    coherent_state,
    conditional_step_expectation,
    displacement,
    apply_displacement,
    filter_init,
    filter_update,
    outcome_probabilities,
    project,
    random_density,
)
from conftest import N_BAR, N_MAX, fock_density


class TestFilterInit:
    def test_uniform_is_maximally_mixed(self):
        state = filter_init("uniform", fock_density(0), N_MAX)
        assert np.array_equal(state.rho_est, np.eye(16) / 16.0)
        assert np.linalg.eigvalsh(state.rho_est)[0] == pytest.approx(1 / 16)

    def test_matched_copies_system_state(self, ops):
        rho0 = coherent_state(ops, 3)
        state = filter_init("matched", rho0, N_MAX)
        assert np.array_equal(state.rho_est, rho0)
        assert state.rho_est is not rho0

    def test_custom_requires_valid_state(self):
        with pytest.raises(ValueError):
            filter_init("custom", fock_density(0), N_MAX, custom_state=np.eye(16))
        with pytest.raises(ValueError):
            filter_init("custom", fock_density(0), N_MAX)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            filter_init("exact", fock_density(0), N_MAX)


class TestFilterUpdate:
    def test_matched_replay_tracks_system(self, ops, model):
        # Identical recursion, identical inputs: replaying the system's
        # outcome and control stream keeps the estimate equal to the state.
        rng = np.random.default_rng(123)
        rho = coherent_state(ops, 3)
        state = filter_init("matched", rho, N_MAX)
        for _ in range(60):
            p_g, _ = outcome_probabilities(rho, model)
            outcome = "g" if rng.random() < p_g else "e"
            alpha = rng.uniform(-0.1, 0.1)
            rho = project(rho, outcome, model)
            rho = apply_displacement(rho, displacement(ops, alpha))
            state, _ = filter_update(state, outcome, alpha, model, ops)
            assert np.abs(state.rho_est - rho).max() <= 1e-10

    def test_uniform_init_elementwise_oracle(self, ops, model):
        # From the maximally mixed state the g-update has the closed form
        # diag_n = cos^2(theta_n) / sum_m (1/16) cos^2(theta_m) / 16.
        state = filter_init("uniform", fock_density(0), N_MAX)
        new_state, half = filter_update(state, "g", 0.0, model, ops)
        cos2 = np.cos(model.phases()) ** 2
        expected = cos2 / cos2.sum()
        assert np.abs(half.diagonal() - expected).max() <= 1e-12
        assert np.abs(new_state.rho_est - np.diag(expected)).max() <= 1e-12

    def test_returns_intermediate_state(self, ops, model):
        state = filter_init("uniform", fock_density(0), N_MAX)
        new_state, half = filter_update(state, "e", 0.05, model, ops)
        # the intermediate is the pre-control estimate
        assert np.abs(
            new_state.rho_est
            - apply_displacement(half, displacement(ops, 0.05))
        ).max() <= 1e-14

    def test_zero_alpha_preserves_diagonality(self, ops, model):
        state = filter_init("uniform", fock_density(0), N_MAX)
        new_state, _ = filter_update(state, "g", 0.0, model, ops)
        est = new_state.rho_est
        assert np.abs(est - np.diag(est.diagonal())).max() == 0.0

    def test_impossible_report_raises(self, ops):
        import math
        from fockstab import make_measurement

        degenerate = make_measurement(math.pi / 2, math.pi / 2, N_MAX)
        state = filter_init("custom", fock_density(0), N_MAX, custom_state=fock_density(0))
        with pytest.raises(ZeroProbabilityOutcome):
            filter_update(state, "g", 0.0, degenerate, ops)

    def test_full_rank_survives_updates(self, ops, model):
        # No detection amplitude vanishes for valid phases, so conditioning
        # cannot kill any eigendirection in finitely many steps.  The least
        # likely directions do shrink geometrically, reaching float noise
        # after ~20 updates, so strict positivity is asserted over a short
        # horizon and absence of spurious negativity over a long one.
        rng = np.random.default_rng(7)
        state = filter_init("uniform", fock_density(0), N_MAX)
        for k in range(40):
            outcome = "g" if rng.random() < 0.5 else "e"
            state, _ = filter_update(state, outcome, rng.uniform(-0.1, 0.1), model, ops)
            if k == 9:
                assert np.linalg.eigvalsh(state.rho_est)[0] > 0.0
        assert np.linalg.eigvalsh(state.rho_est)[0] > -1e-10


class TestContractionSpotChecks:
    def test_overlap_grows_in_expectation(self, ops, model):
        rng = np.random.default_rng(17)
        for _ in range(20):
            rho = random_density(rng, N_MAX)
            est = random_density(rng, N_MAX)
            before = float((rho * est).sum())
            for alpha in (0.0, 0.07, -0.07):
                _, after = conditional_step_expectation(
                    rho, est, lambda *_args, a=alpha: a, model, ops, N_BAR
                )
                assert after >= before - 1e-10

    def test_conjugation_alone_preserves_overlap(self, ops):
        rng = np.random.default_rng(18)
        rho = random_density(rng, N_MAX)
        est = random_density(rng, N_MAX)
        d = displacement(ops, 0.09)
        before = float((rho * est).sum())
        after = float(
            (apply_displacement(rho, d) * apply_displacement(est, d)).sum()
        )
        assert after == pytest.approx(before, abs=1e-12)
