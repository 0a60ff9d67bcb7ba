"""Per-run event logs and the statistics built on them.

For a designated site k the interesting bookkeeping is:

* the particle indices at which the count at k first reaches the
  ceilinged fractions 1/2, 3/4, 7/8, 15/16 of capacity;
* the tally of particles after the half threshold that froze upon
  arrival at k+1 (g);
* the number of particles in an index range whose path minimum reached
  a given site (the deep-reach count C).

Two inequalities tie these together and must hold on every run, not
just on average: the count at k can exceed its half-threshold value
only by particles that reached k, and every upon-arrival freeze at k+1
is a frozen particle at k+1.  ``check_inequalities`` verifies both for
all recorded indices.

Thresholds use ceilings so they are achievable counts for every
capacity.  Seed particles are enumerated site-ascending with indices
1..m; they never freeze "upon arrival" (they are placed, not walked)
and their path minimum is the site they sit on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import ModelParams


@dataclass
class RunLog:
    """Per-arrival outcomes of one run, in arrival order.

    sites[i]: freeze site of the i-th arrival, or -1 if it escaped.
    upon[i]:  1 when the freeze happened upon arrival.
    mins[i]:  clamped path minimum (see ParticleOutcome.min_site).
    """

    params: ModelParams
    sites: np.ndarray
    upon: np.ndarray
    mins: np.ndarray

    @property
    def first_index(self) -> int:
        return self.params.first_arrival_index

    @property
    def last_index(self) -> int:
        return self.params.initial_particle_count + len(self.sites)

    def initial_particles(self) -> List[Tuple[int, int]]:
        """(index, site) for seed particles, site-ascending, indices 1..m."""
        out: List[Tuple[int, int]] = []
        idx = 1
        for site in sorted(self.params.initial_occupancy):
            for _ in range(self.params.initial_occupancy[site]):
                out.append((idx, site))
                idx += 1
        return out


def thresholds_for(capacity: int) -> Dict[str, int]:
    return {
        "half": math.ceil(capacity / 2),
        "three_quarters": math.ceil(3 * capacity / 4),
        "seven_eighths": math.ceil(7 * capacity / 8),
        "fifteen_sixteenths": math.ceil(15 * capacity / 16),
    }


@dataclass
class ProofQuantities:
    """Threshold indices and cumulative series for one run and one site.

    All series are indexed by particle index (0 unused); ``count_at_site``
    is the frozen count at the designated site after particle i,
    ``count_next`` the same one site right, ``reach_cum`` the cumulative
    number of particles whose minimum reached the designated site, and
    ``upon_cum`` the cumulative upon-arrival freezes at site+1.
    """

    site: int
    capacity: int
    half_index: Optional[int]
    three_quarters_index: Optional[int]
    seven_eighths_index: Optional[int]
    fifteen_sixteenths_index: Optional[int]
    count_at_site: np.ndarray
    count_next: np.ndarray
    reach_cum: np.ndarray
    upon_cum: np.ndarray

    @property
    def last_index(self) -> int:
        return len(self.count_at_site) - 1

    def deep_reach_count(self, lower: int, upper: int) -> int:
        """Particles with index in (lower, upper] whose path minimum
        reached the designated site."""
        return int(self.reach_cum[upper] - self.reach_cum[lower])

    def upon_arrival_tally(self, i: int) -> int:
        """Upon-arrival freezes at site+1 over indices (half_index, i];
        zero when the half threshold was never reached or i precedes it."""
        if self.half_index is None or i <= self.half_index:
            return 0
        return int(self.upon_cum[i] - self.upon_cum[self.half_index])

    def check_inequalities(self) -> Dict[str, int]:
        """Violation counts of the two run-level bounds over all recorded
        indices (both must be zero)."""
        violations = {"count_bound": 0, "arrival_bound": 0}
        h = self.half_index
        if h is not None:
            half_value = int(self.count_at_site[h])
            bound = half_value + (self.reach_cum[h + 1 :] - self.reach_cum[h])
            violations["count_bound"] = int(
                np.sum(self.count_at_site[h + 1 :] > bound)
            )
            tally = self.upon_cum[h + 1 :] - self.upon_cum[h]
            violations["arrival_bound"] = int(
                np.sum(self.count_next[h + 1 :] < tally)
            )
        return violations


def compute_proof_quantities(log: RunLog, site: int) -> ProofQuantities:
    """Scan a run log and assemble every designated-site statistic."""
    n = log.params.n
    last = log.last_index
    froze_here = np.zeros(last + 1, dtype=np.int64)
    froze_next = np.zeros(last + 1, dtype=np.int64)
    reached = np.zeros(last + 1, dtype=np.int64)
    upon_next = np.zeros(last + 1, dtype=np.int64)

    for idx, seed_site in log.initial_particles():
        if seed_site == site:
            froze_here[idx] = 1
        elif seed_site == site + 1:
            froze_next[idx] = 1
        if seed_site <= site:
            reached[idx] = 1

    first = log.first_index
    if len(log.sites):
        idx = first + np.arange(len(log.sites), dtype=np.int64)
        froze_here[idx[log.sites == site]] = 1
        at_next = log.sites == site + 1
        froze_next[idx[at_next]] = 1
        upon_next[idx[at_next & (log.upon != 0)]] = 1
        reached[idx[log.mins <= site]] = 1

    count_here = np.cumsum(froze_here)
    count_next = np.cumsum(froze_next)
    reach_cum = np.cumsum(reached)
    upon_cum = np.cumsum(upon_next)

    def first_reach(target: int) -> Optional[int]:
        hits = np.nonzero(count_here >= target)[0]
        return int(hits[0]) if len(hits) else None

    th = thresholds_for(n)
    return ProofQuantities(
        site=site,
        capacity=n,
        half_index=first_reach(th["half"]),
        three_quarters_index=first_reach(th["three_quarters"]),
        seven_eighths_index=first_reach(th["seven_eighths"]),
        fifteen_sixteenths_index=first_reach(th["fifteen_sixteenths"]),
        count_at_site=count_here,
        count_next=count_next,
        reach_cum=reach_cum,
        upon_cum=upon_cum,
    )


@dataclass(frozen=True)
class LemmaStats:
    """Conditional upon-arrival freeze frequency at site+1, restricted to
    particles arriving while the designated site held at least half its
    capacity and whose walk reached site+1."""

    site: int
    capacity: int
    qualifying: int
    successes: int
    frequency: Optional[float]
    standard_error: Optional[float]
    bound: Optional[float]  # 0.5 - 4 * standard_error
    passed: Optional[bool]
    inconclusive: bool
    runs_used: int

    def to_dict(self) -> Dict:
        return {
            "site": self.site,
            "n": self.capacity,
            "qualifying": self.qualifying,
            "successes": self.successes,
            "frequency": self.frequency,
            "se": self.standard_error,
            "bound": self.bound,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "runs_used": self.runs_used,
        }


def _lemma_counts(log: RunLog, site: int, half: int) -> Tuple[int, int]:
    """(qualifying, upon-arrival successes) for one run log."""
    if not len(log.sites):
        return 0, 0
    initial = log.params.initial_occupancy.get(site, 0)
    froze_here = (log.sites == site).astype(np.int64)
    # Count at the site before each arrival walks.
    count_before = initial + np.concatenate(([0], np.cumsum(froze_here)[:-1]))
    qualifies = (count_before >= half) & (log.mins <= site + 1)
    succeeds = qualifies & (log.sites == site + 1) & (log.upon != 0)
    return int(np.sum(qualifies)), int(np.sum(succeeds))


def lemma_ingredient_check(
    logs: Sequence[RunLog], site: int, min_qualifying: int = 2000
) -> LemmaStats:
    """Pool qualifying particles across runs and test the half bound.

    A particle qualifies when, at its arrival, the count at ``site`` was
    already at least ceil(n/2) and its own path minimum reached
    ``site + 1``.  Its per-visit freeze chance on first reaching site+1
    is then count/n >= 1/2, so the pooled upon-arrival frequency must
    sit above 0.5 - 4*SE (SE taken at p = 1/2, the worst case).  Too few
    qualifying particles makes the check inconclusive, not a failure.
    """
    if not logs:
        raise ValueError("no run logs supplied")
    n = logs[0].params.n
    half = thresholds_for(n)["half"]
    qualifying = 0
    successes = 0
    for log in logs:
        if log.params.n != n:
            raise ValueError("all logs must share one capacity")
        q, s = _lemma_counts(log, site, half)
        qualifying += q
        successes += s
    if qualifying == 0:
        return LemmaStats(
            site=site,
            capacity=n,
            qualifying=0,
            successes=0,
            frequency=None,
            standard_error=None,
            bound=None,
            passed=None,
            inconclusive=True,
            runs_used=len(logs),
        )
    freq = successes / qualifying
    se = math.sqrt(0.25 / qualifying)
    bound = 0.5 - 4 * se
    return LemmaStats(
        site=site,
        capacity=n,
        qualifying=qualifying,
        successes=successes,
        frequency=freq,
        standard_error=se,
        bound=bound,
        passed=freq >= bound,
        inconclusive=qualifying < min_qualifying,
        runs_used=len(logs),
    )
