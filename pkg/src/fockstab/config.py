"""JSON configuration handling for the command-line tools.

A configuration file is one flat JSON object.  Unknown keys are rejected,
missing keys take the documented defaults (mid-fringe Ramsey phase, the
reference gain for the target level, epsilon = 0.1, alpha_bar = 0.1,
201 grid points, n_max = 15, 100 steps).  Run parameters (n_traj, seed,
output paths) may live in the same file; command-line flags override them.
"""

from __future__ import annotations

import json
import numbers
from typing import Any

import numpy as np

from .feedback import FeedbackConfig, default_gain
from .fock import validate_density
from .trajectory import ExperimentConfig, validate_experiment

__all__ = [
    "ConfigError",
    "EXPERIMENT_DEFAULTS",
    "load_config_file",
    "resolve_config",
    "default_config",
    "experiment_to_dict",
]


class ConfigError(Exception):
    """A configuration document could not be turned into an experiment."""


EXPERIMENT_DEFAULTS: dict[str, Any] = {
    "n_max": 15,
    "n_bar": 3,
    "phi": 0.3,
    "phi_r": None,
    "c1": None,
    "epsilon": 0.1,
    "alpha_bar": 0.1,
    "grid_points": 201,
    "eta_f": 0.0,
    "steps": 100,
    "filter_init": "matched",
    "initial_state": "coherent",
    "initial_fock": 0,
}

_MATRIX_KEYS = ("initial_state_matrix", "filter_init_matrix")
_RUN_KEYS = ("n_traj", "seed", "out", "summary")
_ALL_KEYS = set(EXPERIMENT_DEFAULTS) | set(_MATRIX_KEYS) | set(_RUN_KEYS)


def load_config_file(path: str) -> dict:
    """Read a JSON configuration document.  I/O errors propagate as OSError;
    anything wrong with the content raises ConfigError."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a JSON object at the top level")
    return raw


def _as_int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"key {key!r} must be an integer, got {value!r}")
    return int(value)


def _as_real(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"key {key!r} must be a real number, got {value!r}")
    return float(value)


def _as_str(value: Any, key: str, choices: tuple[str, ...]) -> str:
    if not isinstance(value, str) or value not in choices:
        raise ConfigError(f"key {key!r} must be one of {choices}, got {value!r}")
    return value


def _as_matrix(value: Any, key: str) -> np.ndarray:
    try:
        matrix = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r} must be a numeric matrix: {exc}") from exc
    try:
        validate_density(matrix, name=key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return matrix


def resolve_config(raw: dict, check_phases: bool = True) -> tuple[ExperimentConfig, dict]:
    """Turn a raw configuration mapping into a validated experiment plus the
    run parameters found alongside it.

    ``check_phases=False`` admits phase-degenerate models so that the
    certification command can report on them instead of refusing to start.
    """
    unknown = sorted(set(raw) - _ALL_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration key: {unknown[0]!r}")

    merged = dict(EXPERIMENT_DEFAULTS)
    for key in EXPERIMENT_DEFAULTS:
        if key in raw:
            merged[key] = raw[key]

    n_max = _as_int(merged["n_max"], "n_max")
    n_bar = _as_int(merged["n_bar"], "n_bar")
    phi = _as_real(merged["phi"], "phi")
    phi_r = None if merged["phi_r"] is None else _as_real(merged["phi_r"], "phi_r")
    c1 = (
        default_gain(n_bar)
        if merged["c1"] is None
        else _as_real(merged["c1"], "c1")
    )
    try:
        feedback = FeedbackConfig(
            n_bar=n_bar,
            c1=c1,
            epsilon=_as_real(merged["epsilon"], "epsilon"),
            alpha_bar=_as_real(merged["alpha_bar"], "alpha_bar"),
            grid_points=_as_int(merged["grid_points"], "grid_points"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    cfg = ExperimentConfig(
        n_max=n_max,
        n_bar=n_bar,
        phi=phi,
        phi_r=phi_r,
        feedback=feedback,
        eta_f=_as_real(merged["eta_f"], "eta_f"),
        steps=_as_int(merged["steps"], "steps"),
        filter_init=_as_str(
            merged["filter_init"], "filter_init", ("matched", "uniform", "custom")
        ),
        initial_state=_as_str(
            merged["initial_state"], "initial_state", ("coherent", "fock", "custom")
        ),
        initial_fock=_as_int(merged["initial_fock"], "initial_fock"),
        initial_state_matrix=(
            _as_matrix(raw["initial_state_matrix"], "initial_state_matrix")
            if "initial_state_matrix" in raw
            else None
        ),
        filter_init_matrix=(
            _as_matrix(raw["filter_init_matrix"], "filter_init_matrix")
            if "filter_init_matrix" in raw
            else None
        ),
    )
    try:
        validate_experiment(cfg, check_phases=check_phases)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    run_params: dict[str, Any] = {}
    if "n_traj" in raw:
        run_params["n_traj"] = _as_int(raw["n_traj"], "n_traj")
    if "seed" in raw:
        run_params["seed"] = _as_int(raw["seed"], "seed")
    for key in ("out", "summary"):
        if key in raw:
            if not isinstance(raw[key], str):
                raise ConfigError(f"key {key!r} must be a path string")
            run_params[key] = raw[key]
    return cfg, run_params


def default_config(**overrides: Any) -> ExperimentConfig:
    """The reference experiment with optional flat-key overrides."""
    cfg, _ = resolve_config(dict(overrides))
    return cfg


def experiment_to_dict(cfg: ExperimentConfig) -> dict:
    """Fully resolved, JSON-ready echo of an experiment configuration.

    The echo feeds back through resolve_config to an equivalent experiment.
    """
    if cfg.feedback is None:
        raise ValueError("open-loop configurations have no file representation")
    echo: dict[str, Any] = {
        "n_max": cfg.n_max,
        "n_bar": cfg.n_bar,
        "phi": cfg.phi,
        "phi_r": cfg.resolved_phi_r(),
        "c1": cfg.feedback.c1,
        "epsilon": cfg.feedback.epsilon,
        "alpha_bar": cfg.feedback.alpha_bar,
        "grid_points": cfg.feedback.grid_points,
        "eta_f": cfg.eta_f,
        "steps": cfg.steps,
        "filter_init": cfg.filter_init,
        "initial_state": cfg.initial_state,
        "initial_fock": cfg.initial_fock,
    }
    if cfg.initial_state_matrix is not None:
        echo["initial_state_matrix"] = np.asarray(cfg.initial_state_matrix).tolist()
    if cfg.filter_init_matrix is not None:
        echo["filter_init_matrix"] = np.asarray(cfg.filter_init_matrix).tolist()
    return echo
