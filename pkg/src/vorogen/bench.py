"""Monte Carlo benchmark harness with counter-derived seeds.

Each simulation draws a fresh tessellation, reconstructs it, and scores the
result against the known generators. Per-simulation seeds come from a
documented counter scheme so any single run can be replayed in isolation,
and aggregation never depends on completion order, which makes worker
pools safe.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .baselines import DEFAULT_PERTURB_EPS
from .errors import VorogenError
from .forward import sample_and_build
from .pipeline import Policies, reconstruct

CSV_HEADER = "n,nsim,method,log10_mean_rmse,log10_max_rse,mean_depth,mean_propagate_ms"


@dataclass(frozen=True)
class SimResult:
    """One simulation's scores. Only the *_time fields vary between runs."""

    n: int
    seed: int
    method: str
    rmse: float
    max_rse: float
    depth: int
    residual_norm: float
    build_time: float
    assemble_solve_time: float
    propagate_time: float

    def key(self) -> tuple:
        """The deterministic fields, for reproducibility comparisons."""
        return (self.n, self.seed, self.method, self.rmse, self.max_rse,
                self.depth, self.residual_norm)


@dataclass(frozen=True)
class CampaignRow:
    """Aggregate over one n: the quantities of the accuracy table plus timing.

    ``log10_max_rse`` takes the max over every cell of every simulation;
    failed simulations are excluded from all aggregates and counted.
    """

    n: int
    nsim: int
    method: str
    log10_mean_rmse: float
    log10_max_rse: float
    mean_depth: float
    mean_propagate_ms: float
    failures: int
    results: tuple[SimResult, ...]


def derive_seed(master: int, n: int, index: int) -> int:
    """Per-simulation seed for simulation ``index`` of size ``n``.

    Spawned from the (master, n, index) entropy triple, so individual
    simulations can be replayed without running the whole campaign.
    """
    return int(np.random.SeedSequence([master, n, index]).generate_state(1)[0])


def run_simulation(
    n: int,
    seed: int,
    method: str = "anchor",
    policies: Policies = Policies(),
    perturb_eps: float = DEFAULT_PERTURB_EPS,
) -> SimResult:
    """Draw one tessellation of size ``n`` and score its reconstruction."""
    if n < 10:
        raise ValueError(f"benchmark simulations need n >= 10, got {n}")
    t0 = time.perf_counter()
    _, tess, gt = sample_and_build(n, seed)
    build_time = time.perf_counter() - t0
    rep = reconstruct(tess, method, policies, gt, perturb_eps)
    return SimResult(
        n=n,
        seed=seed,
        method=method,
        rmse=rep.rmse,
        max_rse=rep.max_rse,
        depth=rep.depth,
        residual_norm=rep.residual if rep.residual is not None else math.nan,
        build_time=build_time,
        assemble_solve_time=rep.assemble_solve_time,
        propagate_time=rep.propagate_time,
    )


_Outcome = Union[SimResult, tuple]


def _run_job(job) -> _Outcome:
    n, seed, method, policies, eps = job
    try:
        return run_simulation(n, seed, method, policies, eps)
    except VorogenError as exc:
        return (n, seed, f"{type(exc).__name__}: {exc}")


def _log10(x: float) -> float:
    if math.isnan(x):
        return math.nan
    return math.log10(x) if x > 0.0 else -math.inf


def run_campaign(
    ns: Sequence[int],
    nsim: int,
    method: str = "anchor",
    policies: Policies = Policies(),
    workers: int = 1,
    master_seed: int = 0,
    perturb_eps: float = DEFAULT_PERTURB_EPS,
) -> list[CampaignRow]:
    """Run ``nsim`` seeded simulations per entry of ``ns`` and aggregate.

    The job list and the seeds depend only on (master_seed, ns, nsim), and
    results are collected in job order, so the output is identical for any
    ``workers`` count.
    """
    if nsim < 1:
        raise ValueError(f"nsim must be >= 1, got {nsim}")
    jobs = [
        (n, derive_seed(master_seed, n, i), method, policies, perturb_eps)
        for n in ns
        for i in range(nsim)
    ]
    if workers <= 1:
        outcomes = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(jobs) // (4 * workers))
            outcomes = list(pool.map(_run_job, jobs, chunksize=chunk))
    rows: list[CampaignRow] = []
    for i, n in enumerate(ns):
        batch = outcomes[i * nsim : (i + 1) * nsim]
        good = [r for r in batch if isinstance(r, SimResult)]
        failures = nsim - len(good)
        if good:
            mean_rmse = sum(r.rmse for r in good) / len(good)
            max_rse = max(r.max_rse for r in good)
            mean_depth = sum(r.depth for r in good) / len(good)
            mean_prop_ms = 1e3 * sum(r.propagate_time for r in good) / len(good)
        else:
            mean_rmse = max_rse = mean_depth = mean_prop_ms = math.nan
        rows.append(
            CampaignRow(
                n=n,
                nsim=nsim,
                method=method,
                log10_mean_rmse=_log10(mean_rmse),
                log10_max_rse=_log10(max_rse),
                mean_depth=mean_depth,
                mean_propagate_ms=mean_prop_ms,
                failures=failures,
                results=tuple(good),
            )
        )
    return rows


def format_row(row: CampaignRow) -> str:
    vals = (row.log10_mean_rmse, row.log10_max_rse, row.mean_depth, row.mean_propagate_ms)
    nums = ",".join(format(v, ".6g") for v in vals)
    return f"{row.n},{row.nsim},{row.method},{nums}"


def export_csv(rows: Sequence[CampaignRow], path, append: bool = False) -> None:
    """Write one CSV line per campaign row (6 significant digits).

    With ``append=True`` the header is only written when the file is new
    or empty.
    """
    has_header = (
        append and os.path.exists(path) and os.path.getsize(path) > 0
    )
    with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
        if not has_header:
            fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")
