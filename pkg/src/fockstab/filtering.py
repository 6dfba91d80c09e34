"""State estimator driven by reported detector outcomes.

The estimator replays the measurement back-action and the applied control
on an internal copy of the state.  With perfect detection and a matched
initial state it reproduces the physical state exactly; initialized at any
full-rank state it still steers the closed loop to the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockOperators, apply_displacement, displacement, validate_density
from .measurement import PROBABILITY_FLOOR, MeasurementModel, project

__all__ = ["INIT_KINDS", "FilterState", "filter_init", "filter_update"]

INIT_KINDS = ("matched", "uniform", "custom")


@dataclass
class FilterState:
    """Current estimate and how it was initialized."""

    rho_est: np.ndarray
    init_kind: str


def filter_init(
    kind: str,
    rho_system_initial: np.ndarray,
    n_max: int,
    custom_state: np.ndarray | None = None,
) -> FilterState:
    """Build the initial estimate.

    ``matched`` copies the system's initial state, ``uniform`` starts at the
    maximally mixed (full-rank) state I/(n_max+1), and ``custom`` uses a
    caller-supplied density matrix, which is validated.
    """
    if kind == "matched":
        rho = np.array(rho_system_initial, dtype=float)
    elif kind == "uniform":
        rho = np.eye(n_max + 1) / (n_max + 1)
    elif kind == "custom":
        if custom_state is None:
            raise ValueError("custom filter initialization requires a state")
        validate_density(custom_state, name="custom filter state")
        rho = np.array(custom_state, dtype=float)
    else:
        raise ValueError(f"filter init kind must be one of {INIT_KINDS}, got {kind!r}")
    return FilterState(rho, kind)


def filter_update(
    state: FilterState,
    reported_outcome: str,
    alpha: float,
    model: MeasurementModel,
    ops: FockOperators,
    floor: float = PROBABILITY_FLOOR,
) -> tuple[FilterState, np.ndarray]:
    """One estimator step: condition on the report, then apply the control.

    Returns the updated state together with the intermediate post-measurement
    estimate, which is what the feedback law consumes.  Raises
    ZeroProbabilityOutcome when the reported outcome is impossible under the
    current estimate.
    """
    rho_half = project(state.rho_est, reported_outcome, model, floor=floor)
    if alpha == 0.0:
        rho_next = rho_half
    else:
        rho_next = apply_displacement(rho_half, displacement(ops, alpha))
    return FilterState(rho_next, state.init_kind), rho_half
