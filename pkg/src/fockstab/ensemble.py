"""Reproducible Monte-Carlo ensembles with per-step statistics.

Trajectory ``i`` always runs on the seed ``mix_seed(master_seed, i)``, and
trajectories are grouped into fixed-size chunks whose partial statistics
are merged in index order, so the result is bit-identical no matter how
many workers execute the chunks or in which order they finish.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .trajectory import ExperimentConfig, run_trajectory, validate_experiment

__all__ = [
    "EnsembleStats",
    "WelfordPartial",
    "mix_seed",
    "welford_partial",
    "welford_merge",
    "run_ensemble",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF


def mix_seed(master_seed: int, index: int) -> int:
    """Derive the per-trajectory seed from (master_seed, index).

    SplitMix64 avalanche applied to master_seed + index * 0x9E3779B97F4A7C15,
    all arithmetic modulo 2**64:

        x  = (master_seed + index * 0x9E3779B97F4A7C15) mod 2**64
        x ^= x >> 30;  x = (x * 0xBF58476D1CE4E5B9) mod 2**64
        x ^= x >> 27;  x = (x * 0x94D049BB133111EB) mod 2**64
        x ^= x >> 31

    This exact formula is a compatibility contract: recorded ensembles can
    be reproduced trajectory-by-trajectory from the master seed alone.
    """
    x = (master_seed + index * 0x9E3779B97F4A7C15) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass
class WelfordPartial:
    """Count / mean / sum-of-squared-deviations accumulator, one slot per step."""

    count: int
    mean: np.ndarray
    m2: np.ndarray


def welford_partial(samples: np.ndarray) -> WelfordPartial:
    """Accumulator for a (n_samples, steps) block of per-step values."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n = samples.shape[0]
    if n == 0:
        width = samples.shape[1] if samples.ndim == 2 else 0
        return WelfordPartial(0, np.zeros(width), np.zeros(width))
    mean = samples.mean(axis=0)
    m2 = ((samples - mean) ** 2).sum(axis=0)
    return WelfordPartial(n, mean, m2)


def welford_merge(partial_a: WelfordPartial, partial_b: WelfordPartial) -> WelfordPartial:
    """Combine accumulators over disjoint sample sets (Chan's update)."""
    if partial_a.count == 0:
        return partial_b
    if partial_b.count == 0:
        return partial_a
    n = partial_a.count + partial_b.count
    delta = partial_b.mean - partial_a.mean
    mean = partial_a.mean + delta * (partial_b.count / n)
    m2 = partial_a.m2 + partial_b.m2 + delta**2 * (partial_a.count * partial_b.count / n)
    return WelfordPartial(n, mean, m2)


@dataclass
class EnsembleStats:
    """Per-step aggregate statistics over an ensemble of trajectories."""

    steps: int
    n_traj: int
    mean_fidelity: np.ndarray
    std_fidelity: np.ndarray
    q05: np.ndarray
    q50: np.ndarray
    q95: np.ndarray
    mean_overlap_filter: np.ndarray


#: Trajectories per reduction chunk.  Fixed (not derived from the worker
#: count) so that the merge order, and with it every rounding, is identical
#: for any parallel schedule.
CHUNK_SIZE = 64


def _chunk_series(args: tuple[ExperimentConfig, int, int, int]):
    cfg, master_seed, start, stop = args
    fid = np.empty((stop - start, cfg.steps))
    ovl = np.empty((stop - start, cfg.steps))
    for i in range(start, stop):
        records = run_trajectory(cfg, mix_seed(master_seed, i))
        fid[i - start] = [r.fidelity_true for r in records]
        ovl[i - start] = [r.overlap for r in records]
    return start, fid, ovl


def run_ensemble(
    cfg: ExperimentConfig,
    n_traj: int,
    master_seed: int,
    n_jobs: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> EnsembleStats:
    """Run ``n_traj`` independent trajectories and aggregate per-step stats.

    Deterministic given (cfg, n_traj, master_seed, chunk_size) regardless of
    ``n_jobs``: seeds are derived per trajectory index and partial results
    are reduced in fixed chunk order.  Quantiles are computed exactly from
    the full per-step samples.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be at least 1, got {n_traj}")
    validate_experiment(cfg)

    chunks = [
        (cfg, master_seed, start, min(start + chunk_size, n_traj))
        for start in range(0, n_traj, chunk_size)
    ]
    if n_jobs <= 1:
        results = [_chunk_series(chunk) for chunk in chunks]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_chunk_series, chunks))
    results.sort(key=lambda item: item[0])

    fid = np.vstack([r[1] for r in results])
    ovl = np.vstack([r[2] for r in results])

    fid_acc = WelfordPartial(0, np.zeros(cfg.steps), np.zeros(cfg.steps))
    ovl_acc = WelfordPartial(0, np.zeros(cfg.steps), np.zeros(cfg.steps))
    for _, fid_chunk, ovl_chunk in results:
        fid_acc = welford_merge(fid_acc, welford_partial(fid_chunk))
        ovl_acc = welford_merge(ovl_acc, welford_partial(ovl_chunk))

    if n_traj > 1:
        std = np.sqrt(fid_acc.m2 / (n_traj - 1))
    else:
        std = np.zeros(cfg.steps)
    q05, q50, q95 = np.quantile(fid, [0.05, 0.50, 0.95], axis=0)
    return EnsembleStats(
        steps=cfg.steps,
        n_traj=n_traj,
        mean_fidelity=fid_acc.mean,
        std_fidelity=std,
        q05=q05,
        q50=q50,
        q95=q95,
        mean_overlap_filter=ovl_acc.mean,
    )
