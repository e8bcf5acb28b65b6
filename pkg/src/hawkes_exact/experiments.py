"""Replicated experiments behind the CLI subcommands.

Replication ``i`` always draws from ``split(seed, i)`` (plus a fixed sub-key
where one replication needs two independent streams), so results do not
depend on how replications are spread over worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .cgf import HawkesParams, algorithm1_cost, psi_B_boundary
from .config import ExperimentConfig
from .errors import TiltInfeasible
from .queue import PerfectSampler, naive_workload_path
from .rng import make_stream, split
from .stationary import N0Sampler, sample_stationary_forward
from .stats import SummaryStats, summarize

__all__ = [
    "HAWKES_COLUMNS",
    "QUEUE_COLUMNS",
    "MIXING_COLUMNS",
    "ExperimentResult",
    "run_sample_hawkes",
    "run_sample_queue",
    "run_mixing",
    "cost_table",
    "replicate",
]

HAWKES_COLUMNS = ["rep", "n_events", "rv_count", "n0_clusters", "seed"]
QUEUE_COLUMNS = ["rep", "w", "t_ps", "horizon", "rounds", "rv_count", "seed"]
MIXING_COLUMNS = ["table", "x", "y", "ci95_halfwidth", "n"]
NAIVE_STREAM = 1


@dataclass
class ExperimentResult:
    rows: list[dict]
    summary: dict
    extra: dict = field(default_factory=dict)


def _chunks(n: int, jobs: int) -> list[range]:
    size = max(1, math.ceil(n / (jobs * 4)))
    return [range(i, min(i + size, n)) for i in range(0, n, size)]


def replicate(worker: Callable, args: tuple, n: int, jobs: int = 1) -> list:
    """Run ``worker(*args, reps)`` over ``range(n)`` and concatenate rows in rep order."""
    if jobs <= 1 or n < 2:
        return worker(*args, range(n))
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(worker, *zip(*[args + (r,) for r in _chunks(n, jobs)])):
            out.extend(part)
    return out


def _hawkes_worker(p: HawkesParams, eta: float, horizon: float, seed: int, reps) -> list[dict]:
    sampler = N0Sampler(p, eta)
    rows = []
    for i in reps:
        rng = split(seed, i)
        w = sample_stationary_forward(p, eta, horizon, None, rng, n0_sampler=sampler)
        rows.append({"rep": i, "n_events": w.count(0.0, horizon), "rv_count": w.rv_count,
                     "n0_clusters": len(w.n0_clusters), "seed": seed})
    return rows


def run_sample_hawkes(cfg: ExperimentConfig) -> ExperimentResult:
    """Stationary windows on ``[0, horizon]``: event counts and N0 sampler cost."""
    eta = cfg.resolved_eta
    rows = replicate(_hawkes_worker, (cfg.hawkes, eta, cfg.horizon, cfg.seed),
                     cfg.replications, cfg.jobs)
    counts = summarize([r["n_events"] for r in rows])
    rv = summarize([r["rv_count"] for r in rows])
    summary = {
        "command": "sample-hawkes",
        "eta": eta,
        "horizon": cfg.horizon,
        "n": counts.n,
        "mean_events": counts.mean,
        "ci95_halfwidth": counts.ci95_halfwidth,
        "expected_events": cfg.hawkes.stationary_rate * cfg.horizon,
        "mean_rv_count": rv.mean,
        "rv_ci95_halfwidth": rv.ci95_halfwidth,
        "formula_rv_count": algorithm1_cost(cfg.hawkes, eta),
    }
    return ExperimentResult(rows, summary)


def _queue_worker(q, eta: float, seed: int, reps) -> list[dict]:
    sampler = PerfectSampler(q, eta)
    rows = []
    for i in reps:
        d = sampler.draw(split(seed, i))
        rows.append({"rep": i, "w": d.value, "t_ps": d.path_length, "horizon": d.horizon,
                     "rounds": d.rounds, "rv_count": d.rv_count, "seed": seed})
    return rows


def _queue_summary(rows: Sequence[dict]) -> dict:
    w = summarize([r["w"] for r in rows])
    t = summarize([r["t_ps"] for r in rows])
    return {
        "n": w.n,
        "mean_w": w.mean,
        "var_w": w.variance,
        "vmr_w": w.vmr,
        "ci95_halfwidth": w.ci95_halfwidth,
        "mean_t_ps": t.mean,
        "t_ps_ci95_halfwidth": t.ci95_halfwidth,
        "mean_horizon": float(np.mean([r["horizon"] for r in rows])),
        "mean_rounds": float(np.mean([r["rounds"] for r in rows])),
        "mean_rv_count": float(np.mean([r["rv_count"] for r in rows])),
    }


def run_sample_queue(cfg: ExperimentConfig) -> ExperimentResult:
    """Exact stationary waiting-time draws."""
    q = cfg.queue
    eta = cfg.resolved_eta
    rows = replicate(_queue_worker, (q, eta, cfg.seed), cfg.replications, cfg.jobs)
    summary = {"command": "sample-queue", "eta": eta, "load": q.load, **_queue_summary(rows)}
    return ExperimentResult(rows, summary)


def _naive_worker(q, eta: float, grid: tuple, seed: int, reps) -> list[np.ndarray]:
    sampler = N0Sampler(q.hawkes, eta)
    return [naive_workload_path(q, grid, eta, make_stream(seed, i, NAIVE_STREAM), sampler)
            for i in reps]


def run_mixing(cfg: ExperimentConfig) -> ExperimentResult:
    """E[W(T)] from an empty start on a grid of T, against exact draws of W and T_ps."""
    q = cfg.queue
    eta = cfg.resolved_eta
    grid = tuple(sorted(cfg.mixing_times))
    positive = tuple(t for t in grid if t > 0)
    if positive:
        paths = np.asarray(replicate(_naive_worker, (q, eta, positive, cfg.seed),
                                     cfg.replications, cfg.jobs))
    else:
        paths = np.zeros((cfg.replications, 0))
    exact = replicate(_queue_worker, (q, eta, cfg.seed), cfg.replications, cfg.jobs)
    rows = []
    col = 0
    naive_stats = {}
    for t in grid:
        if t > 0:
            s = summarize(paths[:, col])
            col += 1
        else:
            s = SummaryStats(0.0, 0.0, math.nan, 0.0, cfg.replications)
        naive_stats[t] = s
        rows.append({"table": "naive_w", "x": t, "y": s.mean, "ci95_halfwidth": s.ci95_halfwidth,
                     "n": s.n})
    w = summarize([r["w"] for r in exact])
    tps = np.array([r["t_ps"] for r in exact])
    ts = summarize(tps)
    rows.append({"table": "perfect_w", "x": "", "y": w.mean, "ci95_halfwidth": w.ci95_halfwidth,
                 "n": w.n})
    rows.append({"table": "mean_t_ps", "x": "", "y": ts.mean, "ci95_halfwidth": ts.ci95_halfwidth,
                 "n": ts.n})
    edges = np.asarray(cfg.histogram_bins + (math.inf,))
    hist, _ = np.histogram(tps, bins=edges)
    for left, c in zip(edges[:-1], hist):
        rows.append({"table": "t_ps_hist", "x": float(left), "y": c / tps.size,
                     "ci95_halfwidth": "", "n": int(c)})
    summary = {
        "command": "mixing",
        "eta": eta,
        "perfect_mean_w": w.mean,
        "perfect_ci95_halfwidth": w.ci95_halfwidth,
        "mean_t_ps": ts.mean,
        "frac_t_ps_below_20": float(np.mean(tps < 20)),
        "frac_t_ps_above_50": float(np.mean(tps > 50)),
        "naive_mean_w": {str(t): s.mean for t, s in naive_stats.items()},
    }
    return ExperimentResult(rows, summary, {"t_ps": tps, "w": np.array([r["w"] for r in exact]),
                                            "naive": paths})


def cost_table(p: HawkesParams, etas: Optional[Sequence[float]] = None, n: int = 20
               ) -> list[dict]:
    """Closed-form expected N0-sampler cost over a tilt grid."""
    if etas is None:
        bound = psi_B_boundary(p)
        if not math.isfinite(bound):
            bound = 50.0
        etas = np.linspace(bound / n, bound, n, endpoint=False)
    rows = []
    for eta in etas:
        try:
            cost = algorithm1_cost(p, float(eta))
        except TiltInfeasible:
            cost = math.inf
        rows.append({"eta": float(eta), "cost": cost})
    return rows
