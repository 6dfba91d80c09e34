import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from fockstab import (
    apply_displacement,
    coherent_state,
    displacement,
    fidelity,
    make_operators,
    random_density,
    validate_density,
)
from conftest import N_MAX, fock_density, truncated_poisson

# Coherent amplitude <3|D(sqrt(3))|0> = e^{-3/2} 3^{3/2} / sqrt(3!),
# frozen from direct evaluation.
AMPLITUDE_AT_3 = 0.47333054798458524
# Poisson weight e^{-3} 3^3 / 3!, frozen from direct evaluation.
POISSON_WEIGHT_3 = 0.22404180765538775


class TestMakeOperators:
    def test_annihilation_entries(self):
        ops = make_operators(2)
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        expected[1, 2] = math.sqrt(2.0)
        assert np.array_equal(ops.a, expected)

    def test_number_operator_diagonal(self):
        ops = make_operators(N_MAX)
        assert ops.n_op[3, 3] == 3.0
        assert np.array_equal(ops.n_op, np.diag(np.arange(16.0)))

    def test_generator_exactly_antisymmetric(self):
        ops = make_operators(N_MAX)
        assert np.array_equal(ops.q.T, -ops.q)

    def test_rejects_zero_truncation(self):
        with pytest.raises(ValueError):
            make_operators(0)

    def test_cache_returns_readonly_arrays(self):
        ops = make_operators(N_MAX)
        assert ops is make_operators(N_MAX)
        with pytest.raises(ValueError):
            ops.q[0, 0] = 1.0


class TestDisplacement:
    def test_zero_amplitude_is_identity(self, ops):
        assert np.array_equal(displacement(ops, 0.0), np.eye(16))

    def test_inverse_pair(self, ops):
        d = displacement(ops, 0.1)
        assert np.abs(d @ displacement(ops, -0.1) - np.eye(16)).max() <= 1e-12

    def test_rejects_non_finite(self, ops):
        with pytest.raises(ValueError):
            displacement(ops, math.nan)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-3.0, 3.0, allow_nan=False))
    def test_orthogonal_and_transpose_inverse(self, alpha):
        ops = make_operators(N_MAX)
        d = displacement(ops, alpha)
        assert np.abs(d @ d.T - np.eye(16)).max() <= 1e-12
        assert np.abs(displacement(ops, -alpha) - d.T).max() <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
    def test_one_parameter_group(self, a1, a2):
        ops = make_operators(N_MAX)
        lhs = displacement(ops, a1) @ displacement(ops, a2)
        assert np.abs(lhs - displacement(ops, a1 + a2)).max() <= 1e-10

    def test_vacuum_column_matches_poisson_amplitudes(self, ops):
        # Independent oracle: the coherent amplitudes e^{-nbar/2} nbar^{n/2}/sqrt(n!)
        # evaluated by direct summation.
        col = displacement(ops, math.sqrt(3.0))[:, 0]
        amps = np.array(
            [
                math.exp(-1.5) * 3.0 ** (n / 2.0) / math.sqrt(math.factorial(n))
                for n in range(16)
            ]
        )
        assert math.exp(-1.5) * 3.0**1.5 / math.sqrt(6.0) == pytest.approx(
            AMPLITUDE_AT_3, rel=1e-14
        )
        assert col[3] == pytest.approx(AMPLITUDE_AT_3, abs=1e-3)
        assert np.abs(col - amps).max() <= 1e-3

    def test_against_wider_truncation_exponential(self, ops):
        # Second oracle route: scipy's matrix exponential on a space wide
        # enough that the truncation boundary is irrelevant.
        wide = make_operators(40)
        reference = expm(math.sqrt(3.0) * np.asarray(wide.q))[:16, 0]
        col = displacement(ops, math.sqrt(3.0))[:, 0]
        assert np.abs(col - reference).max() <= 1e-3

    def test_matches_direct_matrix_exponential(self, ops):
        # Same truncation, independent algorithm.
        direct = expm(0.7 * np.asarray(ops.q))
        assert np.abs(displacement(ops, 0.7) - direct).max() <= 1e-12


class TestApplyDisplacement:
    def test_identity_leaves_state(self, ops):
        rho = coherent_state(ops, 3)
        out = apply_displacement(rho, displacement(ops, 0.0))
        assert np.abs(out - rho).max() <= 1e-14

    def test_preserves_trace_and_spectrum(self, ops):
        rng = np.random.default_rng(11)
        for _ in range(10):
            rho = random_density(rng, N_MAX)
            d = displacement(ops, rng.uniform(-1, 1))
            out = apply_displacement(rho, d)
            assert abs(np.trace(out) - 1.0) <= 1e-12
            assert np.abs(
                np.linalg.eigvalsh(out) - np.linalg.eigvalsh(rho)
            ).max() <= 1e-10

    def test_displaced_vacuum_poisson_weight(self, ops):
        rho = apply_displacement(fock_density(0), displacement(ops, math.sqrt(3.0)))
        assert math.exp(-3.0) * 27.0 / 6.0 == pytest.approx(
            POISSON_WEIGHT_3, rel=1e-14
        )
        assert rho[3, 3] == pytest.approx(POISSON_WEIGHT_3, abs=1e-3)


class TestCoherentState:
    def test_zero_mean_is_vacuum(self, ops):
        assert np.array_equal(coherent_state(ops, 0), fock_density(0))

    def test_mean_photon_number(self, ops):
        rho = coherent_state(ops, 3)
        mean = float(np.trace(ops.n_op @ rho))
        assert 2.99 <= mean <= 3.0
        # Oracle: mean of the renormalized truncated Poisson law.  The
        # n-weighted sum amplifies the per-entry truncation differences,
        # so the tolerance is looser than for single weights.
        expected = float(truncated_poisson(3.0, N_MAX) @ np.arange(16))
        assert mean == pytest.approx(expected, abs=1e-5)

    def test_weight_at_target(self, ops):
        rho = coherent_state(ops, 3)
        assert rho[3, 3] == pytest.approx(POISSON_WEIGHT_3, abs=1e-3)

    @pytest.mark.parametrize("n_bar", [0, 1, 2, 3])
    def test_diagonal_matches_truncated_poisson(self, ops, n_bar):
        rho = coherent_state(ops, n_bar)
        expected = truncated_poisson(float(n_bar), N_MAX) if n_bar else fock_density(0).diagonal()
        assert np.abs(rho.diagonal() - expected).max() <= 1e-6

    def test_diagonal_near_poisson_at_four(self, ops):
        # At mean 4 the truncation boundary already contributes ~1e-5, so
        # the agreement is necessarily looser than for smaller amplitudes
        # (measured 8.2e-6 against the direct-summation oracle).
        rho = coherent_state(ops, 4)
        assert np.abs(rho.diagonal() - truncated_poisson(4.0, N_MAX)).max() <= 2e-5

    def test_warns_when_truncation_clips_tail(self, ops):
        with pytest.warns(UserWarning, match="tail mass"):
            coherent_state(ops, 12)

    def test_no_warning_in_range(self, ops):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            coherent_state(ops, 3)

    def test_rejects_negative_mean(self, ops):
        with pytest.raises(ValueError):
            coherent_state(ops, -1)


class TestFidelity:
    def test_target_state(self):
        assert fidelity(fock_density(3), 3) == 1.0

    def test_orthogonal_state(self):
        assert fidelity(fock_density(2), 3) == 0.0

    def test_coherent_state(self, ops):
        assert fidelity(coherent_state(ops, 3), 3) == pytest.approx(
            POISSON_WEIGHT_3, abs=1e-3
        )

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            fidelity(fock_density(0), 16)


class TestValidateDensity:
    def test_accepts_valid(self, ops):
        validate_density(coherent_state(ops, 3))
        validate_density(np.eye(16) / 16.0)

    def test_rejects_asymmetric(self):
        rho = np.eye(16) / 16.0
        rho[0, 1] = 1e-6
        with pytest.raises(ValueError, match="symmetric"):
            validate_density(rho)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            validate_density(np.eye(16) / 8.0)

    def test_rejects_negative_eigenvalue(self):
        rho = np.eye(16) / 14.0
        rho[0, 0] = -1.0 / 14.0
        with pytest.raises(ValueError, match="positive"):
            validate_density(rho)
