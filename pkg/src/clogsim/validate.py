"""Distributional equivalence checks: collapsed engine vs. literal oracle.

For a small configuration both samplers run the first few arrivals of
many independent clusters.  Outcomes are compared per arrival index
(outcomes at a fixed index are iid across sample runs, so the
chi-square approximation is clean; pooling indices would correlate
cells through early saturations).  The per-config verdict combines the
per-index p-values with a Bonferroni min-p and adds a total-variation
distance on the pooled outcome histogram as an effect-size guard.

A literal-oracle particle that exhausts its step budget voids its whole
sample run; the exclusion rate is reported and, above the tolerance,
voids the comparison rather than passing or failing it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .engine import run_particle_fast
from .model import ModelParams, apply_freeze, init_cluster, run_particle_naive
from .rng import SplitMix64, derive_seed
from .stats import tv_distance, two_sample_chisquare

ABSENT = "absent"
ESCAPED = "escaped"


@dataclass
class SampleTable:
    """Per-arrival-index outcome histograms over many sample runs."""

    name: str
    samples_kept: int
    samples_excluded: int
    per_index: List[Dict[object, int]]
    pooled: Dict[object, int]

    @property
    def exclusion_rate(self) -> float:
        total = self.samples_kept + self.samples_excluded
        return self.samples_excluded / total if total else 0.0


def collect_table(
    name: str,
    params: ModelParams,
    particles: int,
    samples: int,
    master_seed: int,
    particle_sampler: Callable,
    rng_factory: Callable[[int], object],
) -> SampleTable:
    """Run ``samples`` independent clusters for up to ``particles``
    arrivals each and histogram (freeze_site, upon_arrival) per index.

    Arrivals after a saturation are recorded as absent; a truncated
    sampler outcome excludes the whole sample run.
    """
    per_index: List[Dict[object, int]] = [dict() for _ in range(particles)]
    pooled: Dict[object, int] = {}
    kept = 0
    excluded = 0
    for s in range(samples):
        rng = rng_factory(derive_seed(master_seed, s))
        cluster = init_cluster(params)
        outcomes: List[object] = []
        bad = False
        j = params.first_arrival_index
        for _ in range(particles):
            if cluster.blockage_site is not None and params.stop_on_blockage:
                outcomes.append(ABSENT)
                continue
            out = particle_sampler(j, cluster, params, rng)
            if out.truncated:
                bad = True
                break
            if out.escaped:
                outcomes.append(ESCAPED)
            else:
                outcomes.append((out.freeze_site, bool(out.froze_upon_arrival)))
                apply_freeze(cluster, out)
            j += 1
        if bad:
            excluded += 1
            continue
        kept += 1
        for idx, key in enumerate(outcomes):
            per_index[idx][key] = per_index[idx].get(key, 0) + 1
            if key != ABSENT:
                pooled[key] = pooled.get(key, 0) + 1
    return SampleTable(
        name=name,
        samples_kept=kept,
        samples_excluded=excluded,
        per_index=per_index,
        pooled=pooled,
    )


def fast_table(
    params: ModelParams, particles: int, samples: int, master_seed: int
) -> SampleTable:
    return collect_table(
        "fast",
        params,
        particles,
        samples,
        master_seed,
        run_particle_fast,
        SplitMix64,
    )


def naive_table(
    params: ModelParams,
    particles: int,
    samples: int,
    master_seed: int,
    margin: int,
    step_cap: int = 200_000,
) -> SampleTable:
    def sampler(j, cluster, p, rng):
        return run_particle_naive(j, cluster, p, rng, step_cap=step_cap, margin=margin)

    return collect_table(
        f"naive(margin={margin})",
        params,
        particles,
        samples,
        master_seed,
        sampler,
        random.Random,
    )


@dataclass(frozen=True)
class PairComparison:
    name_a: str
    name_b: str
    per_index_p: List[float]
    combined_p: float  # Bonferroni: min(1, indices * min p)
    tv: float
    chi_passed: bool
    tv_passed: bool

    @property
    def passed(self) -> bool:
        return self.chi_passed and self.tv_passed


def compare_tables(
    a: SampleTable,
    b: SampleTable,
    alpha: float = 1e-3,
    tv_threshold: float = 0.02,
) -> PairComparison:
    ps: List[float] = []
    for idx in range(len(a.per_index)):
        _, _, p = two_sample_chisquare(a.per_index[idx], b.per_index[idx])
        ps.append(p)
    combined = min(1.0, len(ps) * min(ps)) if ps else 1.0
    tv = tv_distance(a.pooled, b.pooled)
    return PairComparison(
        name_a=a.name,
        name_b=b.name,
        per_index_p=ps,
        combined_p=combined,
        tv=tv,
        chi_passed=combined > alpha,
        tv_passed=tv < tv_threshold,
    )


@dataclass
class EquivalenceReport:
    n: int
    particles: int
    samples: int
    master_seed: int
    pairs: List[PairComparison]
    naive_exclusion_rates: Dict[int, float]
    max_exclusion_rate: float
    void: bool
    passed: bool
    notes: str = ""

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "particles": self.particles,
            "samples": self.samples,
            "master_seed": self.master_seed,
            "pairs": [
                {
                    "a": p.name_a,
                    "b": p.name_b,
                    "combined_p": p.combined_p,
                    "per_index_p": p.per_index_p,
                    "tv": p.tv,
                    "passed": p.passed,
                }
                for p in self.pairs
            ],
            "naive_exclusion_rates": {
                str(k): v for k, v in self.naive_exclusion_rates.items()
            },
            "void": self.void,
            "passed": self.passed,
            "notes": self.notes,
        }


def validate_engines(
    n: int,
    particles: int,
    samples: int,
    master_seed: int,
    margins: Sequence[int] = (2, 8, 32),
    step_cap: int = 200_000,
    alpha: float = 1e-3,
    tv_threshold: float = 0.02,
    max_exclusion: float = 0.01,
    left_step_prob: float = 0.5,
    initial_occupancy: Optional[Dict[int, int]] = None,
) -> EquivalenceReport:
    """Fast vs literal oracle at every margin, plus margin pairwise.

    Distinct sub-seeds per table keep the samplers independent; the
    verdict is about distributions, never about shared streams.
    """
    params = ModelParams(
        n=n,
        initial_occupancy=dict(initial_occupancy or {0: 1}),
        left_step_prob=left_step_prob,
    )
    fast = fast_table(params, particles, samples, derive_seed(master_seed, 1))
    naive_tables = {
        m: naive_table(
            params,
            particles,
            samples,
            derive_seed(master_seed, 100 + m),
            margin=m,
            step_cap=step_cap,
        )
        for m in margins
    }
    pairs = [
        compare_tables(fast, tbl, alpha=alpha, tv_threshold=tv_threshold)
        for tbl in naive_tables.values()
    ]
    margin_list = list(naive_tables)
    for i in range(len(margin_list)):
        for k in range(i + 1, len(margin_list)):
            pairs.append(
                compare_tables(
                    naive_tables[margin_list[i]],
                    naive_tables[margin_list[k]],
                    alpha=alpha,
                    tv_threshold=tv_threshold,
                )
            )
    rates = {m: tbl.exclusion_rate for m, tbl in naive_tables.items()}
    worst = max(rates.values()) if rates else 0.0
    void = worst >= max_exclusion
    passed = (not void) and all(p.passed for p in pairs)
    notes = "" if not void else (
        f"void: literal-oracle exclusion rate {worst:.4f} at or above "
        f"{max_exclusion:.4f}; raise step_cap"
    )
    return EquivalenceReport(
        n=n,
        particles=particles,
        samples=samples,
        master_seed=master_seed,
        pairs=pairs,
        naive_exclusion_rates=rates,
        max_exclusion_rate=worst,
        void=void,
        passed=passed,
        notes=notes,
    )
