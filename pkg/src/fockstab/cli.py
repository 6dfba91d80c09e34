"""Command-line entry point: simulate, ensemble, verify, params.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.  All CSV output uses '\\n' newlines, '.' decimal points and
12 significant digits, so repeated runs with the same seed are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from .config import (
    ConfigError,
    default_config,
    experiment_to_dict,
    load_config_file,
    resolve_config,
)
from .ensemble import EnsembleStats, run_ensemble
from .trajectory import TrajectoryRecord, run_trajectory
from .verify import run_all_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

TRAJECTORY_HEADER = "step,true_outcome,reported_outcome,alpha,fidelity_true,fidelity_est,v_est"
ENSEMBLE_HEADER = "step,mean_fidelity,std_fidelity,q05,q50,q95,mean_overlap_filter"


def _real(x: float) -> str:
    return format(float(x), ".12g")


def _load_raw(config_path: str | None, overrides: dict[str, Any] | None) -> dict:
    raw = load_config_file(config_path) if config_path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    return raw


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def trajectory_csv_lines(records: Sequence[TrajectoryRecord]) -> list[str]:
    lines = [TRAJECTORY_HEADER]
    for r in records:
        lines.append(
            f"{r.step},{r.true_outcome},{r.reported_outcome},{_real(r.alpha)},"
            f"{_real(r.fidelity_true)},{_real(r.fidelity_est)},{_real(r.v_est)}"
        )
    return lines


def ensemble_csv_lines(stats: EnsembleStats) -> list[str]:
    lines = [ENSEMBLE_HEADER]
    for k in range(stats.steps):
        lines.append(
            f"{k + 1},{_real(stats.mean_fidelity[k])},{_real(stats.std_fidelity[k])},"
            f"{_real(stats.q05[k])},{_real(stats.q50[k])},{_real(stats.q95[k])},"
            f"{_real(stats.mean_overlap_filter[k])}"
        )
    return lines


def cmd_simulate(
    config_path: str | None,
    seed: int | None,
    out_path: str | None,
    overrides: dict[str, Any] | None = None,
) -> int:
    raw = _load_raw(config_path, overrides)
    cfg, run_params = resolve_config(raw)
    seed = seed if seed is not None else run_params.get("seed", 0)
    out_path = out_path or run_params.get("out")
    if not out_path:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    records = run_trajectory(cfg, seed)
    _write_lines(out_path, trajectory_csv_lines(records))
    return EXIT_OK


def cmd_ensemble(
    config_path: str | None,
    n_traj: int | None,
    master_seed: int | None,
    out_path: str | None,
    summary_path: str | None,
    workers: int = 1,
    overrides: dict[str, Any] | None = None,
) -> int:
    raw = _load_raw(config_path, overrides)
    cfg, run_params = resolve_config(raw)
    n_traj = n_traj if n_traj is not None else run_params.get("n_traj", 1000)
    master_seed = master_seed if master_seed is not None else run_params.get("seed", 0)
    out_path = out_path or run_params.get("out")
    summary_path = summary_path or run_params.get("summary")
    if not out_path:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    stats = run_ensemble(cfg, n_traj, master_seed, n_jobs=workers)
    _write_lines(out_path, ensemble_csv_lines(stats))
    if summary_path:
        summary = {
            "config": experiment_to_dict(cfg),
            "n_traj": n_traj,
            "master_seed": master_seed,
        }
        for k in (30, 40, 100):
            summary[f"fidelity_at_{k}"] = (
                float(stats.mean_fidelity[k - 1]) if stats.steps >= k else None
            )
        with open(summary_path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(summary, handle, indent=2, sort_keys=True)
            handle.write("\n")
    return EXIT_OK


def cmd_verify(
    trials: int,
    seed: int,
    config_path: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> int:
    raw = _load_raw(config_path, overrides)
    cfg, _ = resolve_config(raw, check_phases=False)
    reports = run_all_checks(cfg, trials, seed)
    print(f"{'check':<24} {'trials':>6}  {'max_violation':>12}  {'threshold':>9}  verdict")
    for report in reports:
        print(report.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_params(
    config_path: str | None = None, overrides: dict[str, Any] | None = None
) -> int:
    raw = _load_raw(config_path, overrides)
    cfg, run_params = resolve_config(raw)
    resolved = {
        "experiment": experiment_to_dict(cfg),
        "run": {
            "n_traj": run_params.get("n_traj", 1000),
            "seed": run_params.get("seed", 0),
            "out": run_params.get("out"),
            "summary": run_params.get("summary"),
        },
    }
    print(json.dumps(resolved, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockstab",
        description="Closed-loop stabilization of cavity photon-number states: "
        "trajectory simulator, ensemble statistics, and certification checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", metavar="PATH", help="JSON configuration file")
        p.add_argument("--eta-f", type=float, metavar="REAL", help="override eta_f")
        p.add_argument("--steps", type=int, metavar="N", help="override step count")
        p.add_argument("--phi", type=float, metavar="REAL", help="override phi")

    sim = sub.add_parser("simulate", help="write one trajectory as CSV")
    add_common(sim)
    sim.add_argument("--seed", type=int, metavar="U64")
    sim.add_argument("--out", metavar="PATH")

    ens = sub.add_parser("ensemble", help="run an ensemble, write stats CSV + JSON summary")
    add_common(ens)
    ens.add_argument("--trajectories", type=int, metavar="N")
    ens.add_argument("--seed", type=int, metavar="U64", help="master seed")
    ens.add_argument("--out", metavar="PATH")
    ens.add_argument("--summary", metavar="PATH")
    ens.add_argument("--workers", type=int, default=1, metavar="N")

    ver = sub.add_parser("verify", help="run the certification checks")
    add_common(ver)
    ver.add_argument("--trials", type=int, default=1000, metavar="N")
    ver.add_argument("--seed", type=int, default=0, metavar="U64")

    par = sub.add_parser("params", help="print the resolved configuration")
    add_common(par)

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {"eta_f": args.eta_f, "steps": args.steps, "phi": args.phi}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.seed, args.out, _overrides(args))
        if args.command == "ensemble":
            return cmd_ensemble(
                args.config,
                args.trajectories,
                args.seed,
                args.out,
                args.summary,
                workers=args.workers,
                overrides=_overrides(args),
            )
        if args.command == "verify":
            return cmd_verify(args.trials, args.seed, args.config, _overrides(args))
        return cmd_params(args.config, _overrides(args))
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())
