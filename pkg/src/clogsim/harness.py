"""Seeded Monte Carlo driver: runs, sweeps, and saturation estimates.

Reproducibility contract: a run is a pure function of (params, run
seed); run seeds come only from (master_seed, run_index) via
:func:`clogsim.rng.derive_seed`; aggregation is commutative.  Output is
therefore identical for any worker count, which the test suite checks
byte for byte on the serialized files.

Runs default to the jit kernel; ``engine="python"`` walks the same
stream through the pure-Python engine (bit-identical results, useful
for cross-checks and debugging).
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .engine import run_particle_fast
from .kernel import run_cluster_kernel
from .model import (
    ClusterState,
    ModelParams,
    apply_freeze,
    default_budget,
    init_cluster,
    resolve_budget,
)
from .proofstats import ProofQuantities, RunLog, compute_proof_quantities
from .rng import SplitMix64, derive_seed
from .stats import FitResult, log_median_fit, wilson_interval


@dataclass
class RunResult:
    """One completed run.

    blockage_site: position of the first saturated site (the headline
        statistic), or None when the arrival budget ran out first.
    particles_used: seed particles plus every consumed arrival index,
        escaped particles included.
    final_counts: occupancy profile at halt.
    """

    run_index: int
    seed: int
    params: ModelParams
    blockage_site: Optional[int]
    particles_used: int
    escaped_count: int
    truncated: bool
    rightmost: int
    final_counts: List[int]
    log: Optional[RunLog] = None
    proof: Optional[ProofQuantities] = None

    def check_invariants(self) -> None:
        """Post-hoc structural checks applied to every run."""
        n = self.params.n
        if any(c < 0 or c > n for c in self.final_counts):
            raise AssertionError("count outside [0, n]")
        if self.blockage_site is not None:
            b = self.blockage_site
            if self.final_counts[b] != n:
                raise AssertionError("saturated site not at capacity")
            if any(c >= n for c in self.final_counts[:b]):
                raise AssertionError("a site left of the blockage is saturated")


def _python_run(
    params: ModelParams, seed: int, budget: int, log: bool
) -> tuple:
    """Pure-Python twin of the kernel loop (same stream, same schema)."""
    cluster = init_cluster(params)
    rng = SplitMix64(seed)
    sites: List[int] = []
    upons: List[int] = []
    mins: List[int] = []
    arrivals = 0
    escaped = 0
    j = params.first_arrival_index
    while arrivals < budget:
        if cluster.blockage_site is not None and params.stop_on_blockage:
            break
        out = run_particle_fast(j, cluster, params, rng)
        if log:
            sites.append(-1 if out.escaped else out.freeze_site)
            upons.append(1 if out.froze_upon_arrival else 0)
            mins.append(out.min_site)
        arrivals += 1
        if out.escaped:
            escaped += 1
        else:
            apply_freeze(cluster, out)
        j += 1
    if log:
        return (
            cluster,
            arrivals,
            escaped,
            np.asarray(sites, dtype=np.int64),
            np.asarray(upons, dtype=np.uint8),
            np.asarray(mins, dtype=np.int64),
        )
    return cluster, arrivals, escaped, None, None, None


def run_to_blockage(
    params: ModelParams,
    run_seed: int,
    run_index: int = 0,
    log_outcomes: bool = False,
    proof_site: Optional[int] = None,
    engine: str = "kernel",
) -> RunResult:
    """Run arrivals until saturation or budget exhaustion.

    Deterministic in (params, run_seed); ``run_index`` is carried for
    bookkeeping only.  ``proof_site`` implies outcome logging.
    """
    log = log_outcomes or proof_site is not None
    budget = resolve_budget(params)
    if engine == "kernel":
        cluster, arrivals, escaped, sites, upon, mins = run_cluster_kernel(
            params, run_seed, log=log, max_arrivals=budget
        )
    elif engine == "python":
        cluster, arrivals, escaped, sites, upon, mins = _python_run(
            params, run_seed, budget, log
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")

    run_log = None
    proof = None
    if log:
        run_log = RunLog(params=params, sites=sites, upon=upon, mins=mins)
        if proof_site is not None:
            proof = compute_proof_quantities(run_log, proof_site)
    result = RunResult(
        run_index=run_index,
        seed=run_seed,
        params=params,
        blockage_site=cluster.blockage_site,
        particles_used=params.initial_particle_count + arrivals,
        escaped_count=escaped,
        truncated=cluster.blockage_site is None,
        rightmost=cluster.rightmost,
        final_counts=cluster.profile(),
        log=run_log,
        proof=proof,
    )
    result.check_invariants()
    return result


def run_many(
    params: ModelParams,
    runs: int,
    master_seed: int,
    workers: int = 1,
    log_outcomes: bool = False,
    proof_site: Optional[int] = None,
    engine: str = "kernel",
) -> List[RunResult]:
    """Independent seeded runs, returned in run-index order regardless of
    scheduling (the kernel releases the GIL, so threads scale)."""

    def one(i: int) -> RunResult:
        return run_to_blockage(
            params,
            derive_seed(master_seed, i),
            run_index=i,
            log_outcomes=log_outcomes,
            proof_site=proof_site,
            engine=engine,
        )

    if workers <= 1:
        return [one(i) for i in range(runs)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(runs)))


@dataclass(frozen=True)
class SaturationEstimate:
    """Frequency of runs whose first saturated site is the given site,
    within the arrival budget - a lower bound on the unrestricted
    saturation probability, since runs halt at their first saturation."""

    site: int
    runs: int
    hits: int
    frequency: float
    ci_low: float
    ci_high: float


def saturation_from_results(results: Sequence[RunResult], site: int) -> SaturationEstimate:
    hits = sum(1 for r in results if r.blockage_site == site)
    runs = len(results)
    lo, hi = wilson_interval(hits, runs)
    return SaturationEstimate(
        site=site,
        runs=runs,
        hits=hits,
        frequency=hits / runs if runs else 0.0,
        ci_low=lo,
        ci_high=hi,
    )


def estimate_saturation(
    params: ModelParams,
    site: int,
    runs: int,
    master_seed: int,
    budget: Optional[int] = None,
    workers: int = 1,
) -> SaturationEstimate:
    """Monte Carlo estimate of the saturation frequency at one site."""
    if budget is not None:
        params = dataclasses.replace(params, max_particles=budget)
    results = run_many(params, runs, master_seed, workers=workers)
    return saturation_from_results(results, site)


@dataclass
class SweepRow:
    n: int
    runs: int
    median_B: Optional[float]
    q25_B: Optional[float]
    q75_B: Optional[float]
    truncated_frac: float
    saturation: Dict[int, SaturationEstimate] = field(default_factory=dict)


@dataclass
class SweepConfig:
    n_values: List[int]
    runs: int
    master_seed: int
    budget_base: int = 10_000
    workers: int = 1
    saturation_sites: List[int] = field(default_factory=lambda: [1])
    left_step_prob: float = 0.5
    initial_occupancy: Optional[Dict[int, int]] = None


@dataclass
class SweepSummary:
    rows: List[SweepRow]
    fit: Optional[FitResult]
    fit_note: str = ""


def _censored_quantile(values: List[float], q: float) -> Optional[float]:
    # Truncated runs enter as +inf: the quantile stays exact as long as
    # it falls below the censoring fraction.
    v = float(np.quantile(np.asarray(values, dtype=float), q))
    return v if math.isfinite(v) else None


def aggregate_runs(n: int, results: Sequence[RunResult], sites: Sequence[int]) -> SweepRow:
    """Order-independent aggregation of one capacity's runs."""
    values = [
        float(r.blockage_site) if r.blockage_site is not None else math.inf
        for r in results
    ]
    truncated = sum(1 for r in results if r.truncated)
    return SweepRow(
        n=n,
        runs=len(results),
        median_B=_censored_quantile(values, 0.5),
        q25_B=_censored_quantile(values, 0.25),
        q75_B=_censored_quantile(values, 0.75),
        truncated_frac=truncated / len(results) if results else 0.0,
        saturation={s: saturation_from_results(results, s) for s in sites},
    )


def summarize_sweep(rows: List[SweepRow]) -> SweepSummary:
    over = [row.n for row in rows if row.truncated_frac > 0.5]
    if over:
        return SweepSummary(
            rows=rows,
            fit=None,
            fit_note=f"fit refused: truncation above 50% at n in {over}",
        )
    eligible = [r for r in rows if r.median_B is not None and r.median_B > 0]
    fit = log_median_fit([r.n for r in eligible], [r.median_B for r in eligible])
    note = "" if fit is not None else "fit absent: fewer than two usable rows"
    return SweepSummary(rows=rows, fit=fit, fit_note=note)


def sweep(config: SweepConfig) -> SweepSummary:
    """Per-capacity Monte Carlo sweep with the growing budget schedule."""
    rows: List[SweepRow] = []
    for n in config.n_values:
        occupancy = config.initial_occupancy or {0: 1}
        params = ModelParams(
            n=n,
            initial_occupancy=dict(occupancy),
            left_step_prob=config.left_step_prob,
            max_particles=default_budget(n, config.budget_base),
        )
        # Distinct master per n so rows are independent experiments.
        results = run_many(
            params, config.runs, derive_seed(config.master_seed, n), workers=config.workers
        )
        rows.append(aggregate_runs(n, results, config.saturation_sites))
    return summarize_sweep(rows)
