"""CSV loading for the simulator's two output schemas.

Readers are strict: a missing column or an empty data section is a named
error, never a silently blank plot.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = [
    "PlotDataError",
    "MissingColumnError",
    "TRAJECTORY_COLUMNS",
    "ENSEMBLE_COLUMNS",
    "read_trajectory_csv",
    "read_ensemble_csv",
]

TRAJECTORY_COLUMNS = (
    "step",
    "true_outcome",
    "reported_outcome",
    "alpha",
    "fidelity_true",
    "fidelity_est",
    "v_est",
)
ENSEMBLE_COLUMNS = (
    "step",
    "mean_fidelity",
    "std_fidelity",
    "q05",
    "q50",
    "q95",
    "mean_overlap_filter",
)


class PlotDataError(Exception):
    """Input CSV cannot be plotted."""


class MissingColumnError(PlotDataError):
    def __init__(self, path: str, columns: list[str]):
        self.columns = columns
        super().__init__(f"{path} is missing required column(s): {', '.join(columns)}")


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [column for column in required if column not in header]
        if missing:
            raise MissingColumnError(path, missing)
        rows = list(reader)
    if not rows:
        raise PlotDataError(f"{path} has a header but no data rows")
    return rows


def _column(rows: list[dict], name: str, path: str) -> np.ndarray:
    try:
        return np.array([float(row[name]) for row in rows])
    except (TypeError, ValueError) as exc:
        raise PlotDataError(f"{path}: column {name!r} is not numeric: {exc}") from exc


def read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    """Load one simulated trajectory; outcomes come back as arrays of 'g'/'e'."""
    rows = _read_rows(path, TRAJECTORY_COLUMNS)
    data = {
        name: _column(rows, name, path)
        for name in ("step", "alpha", "fidelity_true", "fidelity_est", "v_est")
    }
    for name in ("true_outcome", "reported_outcome"):
        values = [row[name] for row in rows]
        bad = sorted({v for v in values if v not in ("g", "e")})
        if bad:
            raise PlotDataError(f"{path}: column {name!r} has non-outcome values {bad}")
        data[name] = np.array(values)
    return data


def read_ensemble_csv(path: str) -> dict[str, np.ndarray]:
    """Load one per-step ensemble statistics file."""
    rows = _read_rows(path, ENSEMBLE_COLUMNS)
    return {name: _column(rows, name, path) for name in ENSEMBLE_COLUMNS}
