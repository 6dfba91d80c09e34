"""Command-line wrappers: plot-traj and plot-ensemble.

Exit codes: 0 success, 2 malformed input (missing columns, empty data,
bad values), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .figures import PlotSpec, TRAJECTORY_PANELS, render_ensemble, render_trajectory
from .io import PlotDataError

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_IO = 3


def plot_trajectory(traj_csv: str, out_image: str, panels: Sequence[str] | None = None) -> int:
    """Render the per-step panels for one trajectory CSV."""
    try:
        spec = PlotSpec(
            inputs=[traj_csv],
            out_image=out_image,
            panels=tuple(panels) if panels else TRAJECTORY_PANELS,
        )
        render_trajectory(spec)
    except PlotDataError as exc:
        print(f"plot-traj: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"plot-traj: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def plot_ensemble(stats_csvs: Sequence[str], labels: Sequence[str], out_image: str) -> int:
    """Overlay mean-fidelity curves with quantile bands, one per CSV."""
    try:
        spec = PlotSpec(
            inputs=list(stats_csvs), out_image=out_image, labels=list(labels)
        )
        render_ensemble(spec)
    except PlotDataError as exc:
        print(f"plot-ensemble: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"plot-ensemble: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def traj_main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-traj",
        description="Render outcome/control/fidelity panels from a trajectory CSV.",
    )
    parser.add_argument("traj_csv", metavar="IN.csv")
    parser.add_argument("out_image", metavar="OUT.png")
    parser.add_argument(
        "--panels",
        default=",".join(TRAJECTORY_PANELS),
        metavar="A,B,...",
        help=f"comma-separated subset of {TRAJECTORY_PANELS}",
    )
    args = parser.parse_args(argv)
    panels = [p for p in args.panels.split(",") if p]
    return plot_trajectory(args.traj_csv, args.out_image, panels)


def ensemble_main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-ensemble",
        description="Overlay ensemble mean-fidelity curves with 5-95% bands.",
    )
    parser.add_argument(
        "stats_csvs", metavar="IN1.csv[,IN2.csv...]", help="comma-separated stats CSVs"
    )
    parser.add_argument("out_image", metavar="OUT.png")
    parser.add_argument(
        "--labels", default="", metavar="A,B,...", help="legend labels, one per input"
    )
    args = parser.parse_args(argv)
    inputs = [p for p in args.stats_csvs.split(",") if p]
    labels = [l for l in args.labels.split(",") if l]
    return plot_ensemble(inputs, labels, args.out_image)


def traj_entry() -> None:
    sys.exit(traj_main())


def ensemble_entry() -> None:
    sys.exit(ensemble_main())
