"""Figure assembly for trajectory panels and ensemble fidelity curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PlotDataError, read_ensemble_csv, read_trajectory_csv

__all__ = ["PlotSpec", "TRAJECTORY_PANELS", "render_trajectory", "render_ensemble"]

TRAJECTORY_PANELS = ("outcomes", "alpha", "fidelity")


@dataclass
class PlotSpec:
    """What to read, what to draw, where to write.

    ``inputs`` are CSV paths (one for a trajectory figure, one or more for
    an ensemble overlay); ``panels`` selects trajectory panels; ``labels``
    name ensemble curves in the legend.
    """

    inputs: list[str]
    out_image: str
    panels: tuple[str, ...] = TRAJECTORY_PANELS
    labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.inputs:
            raise PlotDataError("at least one input CSV is required")
        unknown = [p for p in self.panels if p not in TRAJECTORY_PANELS]
        if unknown:
            raise PlotDataError(
                f"unknown panel(s) {unknown}; available: {TRAJECTORY_PANELS}"
            )
        if not self.panels:
            raise PlotDataError("at least one panel is required")


def render_trajectory(spec: PlotSpec) -> None:
    """Stacked per-step panels for one closed-loop trajectory."""
    data = read_trajectory_csv(spec.inputs[0])
    steps = data["step"]

    fig, axes = plt.subplots(
        len(spec.panels),
        1,
        sharex=True,
        figsize=(8.0, 2.2 * len(spec.panels)),
        squeeze=False,
    )
    axes = axes[:, 0]

    for axis, panel in zip(axes, spec.panels):
        if panel == "outcomes":
            as_level = np.where(data["reported_outcome"] == "e", 1.0, 0.0)
            axis.plot(steps, as_level, "k.", markersize=4)
            axis.set_yticks([0.0, 1.0], labels=["g", "e"])
            axis.set_ylim(-0.3, 1.3)
            axis.set_ylabel("reported")
        elif panel == "alpha":
            axis.step(steps, data["alpha"], where="mid", lw=1.0)
            axis.axhline(0.0, color="0.7", lw=0.6)
            axis.set_ylabel(r"$\alpha_k$")
        else:
            axis.plot(steps, data["fidelity_true"], lw=1.2, label="true")
            axis.plot(steps, data["fidelity_est"], lw=1.0, ls="--", label="estimate")
            axis.set_ylim(0.0, 1.0)
            axis.set_ylabel("target population")
            axis.legend(loc="lower right", frameon=False)

    axes[-1].set_xlabel("step")
    axes[-1].set_xlim(0.0, float(steps.max()))
    fig.align_ylabels(axes)
    fig.tight_layout()
    fig.savefig(spec.out_image, dpi=150)
    plt.close(fig)


def render_ensemble(spec: PlotSpec) -> None:
    """Mean fidelity per step with the 5-95% quantile band, one curve per
    input; inputs with different step counts keep their own extents."""
    if spec.labels and len(spec.labels) != len(spec.inputs):
        raise PlotDataError(
            f"{len(spec.labels)} label(s) for {len(spec.inputs)} input(s)"
        )
    labels = spec.labels or [path for path in spec.inputs]

    fig, axis = plt.subplots(figsize=(7.0, 4.2))
    for path, label in zip(spec.inputs, labels):
        data = read_ensemble_csv(path)
        (line,) = axis.plot(data["step"], data["mean_fidelity"], lw=1.4, label=label)
        axis.fill_between(
            data["step"], data["q05"], data["q95"], alpha=0.2, color=line.get_color()
        )
    axis.set_xlabel("step")
    axis.set_ylabel("mean target population")
    axis.set_ylim(0.0, 1.0)
    axis.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    fig.savefig(spec.out_image, dpi=150)
    plt.close(fig)
