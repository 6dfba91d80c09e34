"""Offline figure generation for the cavity-stabilization simulator's CSVs."""

from .cli import plot_ensemble, plot_trajectory
from .figures import PlotSpec, render_ensemble, render_trajectory
from .io import (
    ENSEMBLE_COLUMNS,
    TRAJECTORY_COLUMNS,
    MissingColumnError,
    PlotDataError,
    read_ensemble_csv,
    read_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ENSEMBLE_COLUMNS",
    "MissingColumnError",
    "PlotDataError",
    "PlotSpec",
    "TRAJECTORY_COLUMNS",
    "plot_ensemble",
    "plot_trajectory",
    "read_ensemble_csv",
    "read_trajectory_csv",
    "render_ensemble",
    "render_trajectory",
]
