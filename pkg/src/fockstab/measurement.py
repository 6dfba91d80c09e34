"""Dispersive atom readout of the cavity: the diagonal Kraus pair, outcome
probabilities, and the projective back-action update.

Each probe atom picks up a phase ``theta_n = (phi_r + phi)/2 + n*phi`` per
photon-number component, and is detected in ``g`` or ``e`` with amplitudes
``cos(theta_n)`` / ``sin(theta_n)``.  Both operators are diagonal, so the
measurement commutes with photon number and number states are fixed points
of the back-action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fock import resymmetrize

__all__ = [
    "OUTCOMES",
    "MeasurementModel",
    "PhaseReport",
    "ZeroProbabilityOutcome",
    "make_measurement",
    "mid_fringe_phi_r",
    "validate_phases",
    "outcome_probabilities",
    "project",
    "flip_outcome",
]

OUTCOMES = ("g", "e")

#: Outcome probabilities below this are treated as sampling inconsistencies.
PROBABILITY_FLOOR = 1e-12


class ZeroProbabilityOutcome(RuntimeError):
    """Raised when a state is conditioned on an outcome it cannot produce."""


def flip_outcome(outcome: str) -> str:
    return "e" if outcome == "g" else "g"


@dataclass(frozen=True)
class MeasurementModel:
    """The detection operators generated by the phases (phi, phi_r).

    ``m_g`` and ``m_e`` are the diagonal matrices cos(theta) and sin(theta);
    their squares sum to the identity exactly up to rounding.  Elementwise
    weight tables for the back-action are precomputed and read-only.
    """

    phi: float
    phi_r: float
    n_max: int
    m_g: np.ndarray = field(init=False, repr=False)
    m_e: np.ndarray = field(init=False, repr=False)
    _diag_g: np.ndarray = field(init=False, repr=False)
    _diag_e: np.ndarray = field(init=False, repr=False)
    _prob_g: np.ndarray = field(init=False, repr=False)
    _prob_e: np.ndarray = field(init=False, repr=False)
    _w_g: np.ndarray = field(init=False, repr=False)
    _w_e: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        theta = self.phases()
        diag_g = np.cos(theta)
        diag_e = np.sin(theta)
        fields = {
            "m_g": np.diag(diag_g),
            "m_e": np.diag(diag_e),
            "_diag_g": diag_g,
            "_diag_e": diag_e,
            "_prob_g": diag_g**2,
            "_prob_e": diag_e**2,
            "_w_g": np.outer(diag_g, diag_g),
            "_w_e": np.outer(diag_e, diag_e),
        }
        for key, arr in fields.items():
            arr.setflags(write=False)
            object.__setattr__(self, key, arr)

    def phases(self) -> np.ndarray:
        """theta_n for n = 0..n_max."""
        n = np.arange(self.n_max + 1)
        return (self.phi_r + self.phi) / 2.0 + n * self.phi

    @property
    def dim(self) -> int:
        return self.n_max + 1


@lru_cache(maxsize=128)
def make_measurement(phi: float, phi_r: float, n_max: int) -> MeasurementModel:
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    return MeasurementModel(float(phi), float(phi_r), int(n_max))


def mid_fringe_phi_r(phi: float, n_bar: int) -> float:
    """Ramsey phase putting the target level on the 50/50 detection fringe.

    Solves (phi_r + phi)/2 + n_bar*phi = pi/4 for phi_r, the setting that
    maximizes measurement sensitivity at the target.
    """
    return math.pi / 2.0 - (2 * n_bar + 1) * phi


@dataclass(frozen=True)
class PhaseReport:
    """Result of checking the phase non-degeneracy conditions.

    The closed loop provably singles out the target only when (i) no
    detection phase theta_n sits on a multiple of pi/2 and (ii) the
    detection probabilities cos^2(theta_n) are pairwise distinct.
    ``degenerate_levels`` lists the n violating (i); ``colliding_pairs``
    the (n, m) violating (ii).
    """

    valid: bool
    margin: float
    degenerate_levels: tuple[int, ...]
    colliding_pairs: tuple[tuple[int, int], ...]
    min_level_distance: float
    min_pair_distance: float

    def describe(self) -> str:
        if self.valid:
            return "phase conditions satisfied"
        parts = []
        if self.degenerate_levels:
            parts.append(
                "(phi_r + phi)/2 + n*phi is a multiple of pi/2 for n = "
                + ", ".join(map(str, self.degenerate_levels))
            )
        if self.colliding_pairs:
            pairs = ", ".join(f"({n},{m})" for n, m in self.colliding_pairs[:8])
            more = "" if len(self.colliding_pairs) <= 8 else ", ..."
            parts.append(
                f"cos^2 detection probabilities collide for level pairs {pairs}{more}"
            )
        return "degenerate measurement phases: " + "; ".join(parts)


def validate_phases(model: MeasurementModel, margin: float = 1e-9) -> PhaseReport:
    """Check the non-degeneracy of the detection phases to within ``margin``."""
    theta = model.phases()
    half_pi = math.pi / 2.0
    rem = np.mod(theta, half_pi)
    level_dist = np.minimum(rem, half_pi - rem)
    degenerate = tuple(int(n) for n in np.flatnonzero(level_dist <= margin))

    cos2 = model._prob_g
    gaps = np.abs(cos2[:, None] - cos2[None, :])
    iu = np.triu_indices(model.dim, k=1)
    colliding = tuple(
        (int(i), int(j))
        for i, j in zip(*iu)
        if gaps[i, j] <= margin
    )
    return PhaseReport(
        valid=not degenerate and not colliding,
        margin=margin,
        degenerate_levels=degenerate,
        colliding_pairs=colliding,
        min_level_distance=float(level_dist.min()),
        min_pair_distance=float(gaps[iu].min()),
    )


def outcome_probabilities(rho: np.ndarray, model: MeasurementModel) -> tuple[float, float]:
    """Detection probabilities (p_g, p_e) for the current cavity state."""
    diag = np.diagonal(rho)
    return float(diag @ model._prob_g), float(diag @ model._prob_e)


def project(
    rho: np.ndarray,
    outcome: str,
    model: MeasurementModel,
    floor: float = PROBABILITY_FLOOR,
) -> np.ndarray:
    """Back-action of detecting ``outcome``: M rho M / tr(M rho M).

    Raises ZeroProbabilityOutcome when the outcome's probability under
    ``rho`` falls below ``floor``; renormalizing noise would be meaningless.
    """
    if outcome == "g":
        weights = model._w_g
    elif outcome == "e":
        weights = model._w_e
    else:
        raise ValueError(f"outcome must be 'g' or 'e', got {outcome!r}")
    conditioned = rho * weights
    prob = float(np.trace(conditioned))
    if prob < floor:
        raise ZeroProbabilityOutcome(
            f"outcome {outcome!r} has probability {prob:.3e}, below the "
            f"floor {floor:.1e}"
        )
    return resymmetrize(conditioned / prob)
