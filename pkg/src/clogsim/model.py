"""Exact data model of the one-dimensional clogging process.

A cluster of frozen particles occupies nonnegative lattice sites; site k
holds ``counts[k]`` particles, at most ``n`` (the per-site capacity).
Particles arrive one at a time from the right: particle ``j`` appears at
site ``j + 2``, immediately steps to ``j + 1``, and then at every visit
to a site ``s`` freezes with probability ``counts[s-1] / n``, otherwise
moves one site left or right (equally likely in the symmetric walk).
A frozen particle never moves again.  The run ends when some site's
count reaches ``n``; that site is saturated ("clogged") and its position
is the headline statistic of the whole artifact.

This module also hosts the literal step-by-step walker
(:func:`run_particle_naive`), which serves as the ground-truth oracle
for the collapsed-excursion engine.  Walking every step of a recurrent
excursion is not possible as stated (expected return times are
infinite), so the oracle walks literally only inside a window
``[-margin, rightmost + margin]`` and applies the exact almost-sure
excursion outcome beyond it; any margin >= 1 yields the same outcome
distribution, which is itself one of the properties under test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional


class OccupancyError(ValueError):
    """Invalid model parameters or initial occupancy."""


class StateError(RuntimeError):
    """An operation was applied to a state that cannot accept it."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one simulated process.

    n: per-site capacity (>= 1).
    initial_occupancy: site -> count of pre-frozen particles.  The formal
        default is a single particle at the origin; ``{0: 1, 1: 1}`` is
        the documented informal alternative.
    left_step_prob: probability, conditional on moving, of stepping
        toward the cluster (left).  0.5 is the symmetric walk; any value
        in (0, 1] gives the directed-walk variant, where particles may
        escape to infinity instead of freezing.
    max_particles: arrival budget before a run is declared truncated;
        ``None`` means the harness default budget for this n.
    stop_on_blockage: halt at the first saturated site (default).  When
        False the run continues to the arrival budget for occupancy
        profile studies; freezes that would push a site past capacity
        are suppressed (the particle keeps walking), so counts still
        never exceed n.
    """

    n: int
    initial_occupancy: Dict[int, int] = field(default_factory=lambda: {0: 1})
    left_step_prob: float = 0.5
    max_particles: Optional[int] = None
    stop_on_blockage: bool = True

    def __post_init__(self) -> None:
        if self.n < 1:
            raise OccupancyError(f"capacity n must be >= 1, got {self.n}")
        if not self.initial_occupancy:
            raise OccupancyError("initial_occupancy must contain at least one site")
        for site, count in self.initial_occupancy.items():
            if site < 0:
                raise OccupancyError(f"initial site {site} is negative")
            if not 1 <= count <= self.n:
                raise OccupancyError(
                    f"initial count {count} at site {site} outside [1, {self.n}]"
                )
        total = sum(self.initial_occupancy.values())
        if max(self.initial_occupancy) > total + 1:
            # Arrivals start at (index + 2); occupancy further right than
            # the number of seed particles + 1 would place an arrival
            # inside the cluster, which the start rule never does.
            raise OccupancyError(
                "initial occupancy extends too far right for the arrival rule: "
                f"max site {max(self.initial_occupancy)} > {total} + 1"
            )
        if not 0.0 < self.left_step_prob <= 1.0:
            raise OccupancyError(
                f"left_step_prob must be in (0, 1], got {self.left_step_prob}"
            )
        if self.max_particles is not None and self.max_particles < 0:
            raise OccupancyError("max_particles must be nonnegative")

    @property
    def initial_particle_count(self) -> int:
        return sum(self.initial_occupancy.values())

    @property
    def first_arrival_index(self) -> int:
        """Index of the first arriving particle; seeds take 1..m."""
        return self.initial_particle_count + 1


@dataclass
class ClusterState:
    """Frozen-particle counts, frontier, and saturation status.

    counts: dense per-site counts for sites 0..rightmost (zeros allowed
        where an exotic initial occupancy left holes).
    rightmost: largest site with a positive count (the frontier).
    particles_placed: frozen particles so far, initial occupancy included.
    blockage_site: leftmost site whose count reached capacity, or None.
    """

    counts: List[int]
    rightmost: int
    particles_placed: int
    capacity: int
    blockage_site: Optional[int] = None

    def count_at(self, site: int) -> int:
        if site < 0 or site > self.rightmost:
            return 0
        return self.counts[site]

    def freeze_exposure(self, position: int) -> int:
        """Left-neighbour count governing the per-visit freeze draw.

        Zero when the target site is already at capacity: such freezes
        are suppressed so counts never pass n (only reachable when a run
        continues past the first saturation).
        """
        if position < 1:
            return 0
        c = self.count_at(position - 1)
        if c and self.count_at(position) >= self.capacity:
            return 0
        return c

    def profile(self) -> List[int]:
        return list(self.counts)


@dataclass
class WalkerState:
    """One in-flight particle: position, absorption flag, path minimum."""

    position: int
    previous_position: Optional[int] = None
    frozen: bool = False
    min_site: Optional[int] = None  # inclusive running path minimum
    step_count: int = 0

    def __post_init__(self) -> None:
        if self.min_site is None:
            self.min_site = self.position


@dataclass(frozen=True)
class ParticleOutcome:
    """Fate of one arriving particle.

    freeze_site: where it froze, or None if it escaped to infinity
        (directed walks only).
    froze_upon_arrival: True when the freeze happened on the first visit
        to a strict new path minimum.
    min_site: path minimum clamped to [-1, entry + 2].  -1 means the
        walk went below the origin (exact depth is irrelevant to every
        supported query); entry + 2 means the particle never reached the
        cluster.  Exact for all thresholds at cluster sites.
    visits: site-visits consumed.  Engines count visits differently
        (collapsed excursions are one re-visit), so visit counts are
        comparable within an engine only.
    truncated: the literal walker ran out of its step budget; the
        outcome carries no freeze and must be discarded by the caller.
    """

    index: int
    freeze_site: Optional[int]
    froze_upon_arrival: bool
    min_site: int
    visits: int
    truncated: bool = False

    @property
    def escaped(self) -> bool:
        return self.freeze_site is None and not self.truncated


def init_cluster(params: ModelParams) -> ClusterState:
    """Build the starting cluster from the initial occupancy.

    A seed count already at capacity is an immediate saturation (the
    degenerate n=1 process saturates the origin before any arrival).
    """
    rightmost = max(params.initial_occupancy)
    counts = [0] * (rightmost + 1)
    for site, count in params.initial_occupancy.items():
        counts[site] = count
    blockage = None
    for site, count in enumerate(counts):
        if count == params.n:
            blockage = site
            break
    return ClusterState(
        counts=counts,
        rightmost=rightmost,
        particles_placed=sum(params.initial_occupancy.values()),
        capacity=params.n,
        blockage_site=blockage,
    )


def transition_step(
    walker: WalkerState, cluster: ClusterState, params: ModelParams, rng
) -> WalkerState:
    """One visit of the three-branch transition law.

    With c the freeze exposure at the walker's position: freeze with
    probability c/n, otherwise move left with probability
    (1 - c/n) * left_step_prob and right with the remainder.  Draw
    schema: one uniform for the freeze decision (skipped when c == 0),
    then one uniform for the direction.  ``rng`` is anything with a
    ``random()`` method.
    """
    if walker.frozen:
        raise StateError("frozen walkers never move again")
    pos = walker.position
    c = cluster.freeze_exposure(pos)
    if c and rng.random() < c / params.n:
        return WalkerState(
            position=pos,
            previous_position=pos,
            frozen=True,
            min_site=min(walker.min_site, pos),
            step_count=walker.step_count + 1,
        )
    new_pos = pos - 1 if rng.random() < params.left_step_prob else pos + 1
    return WalkerState(
        position=new_pos,
        previous_position=pos,
        frozen=False,
        min_site=min(walker.min_site, new_pos),
        step_count=walker.step_count + 1,
    )


def apply_freeze(cluster: ClusterState, outcome: ParticleOutcome) -> ClusterState:
    """Commit a freeze to the cluster (in place; the cluster is returned).

    Escaped particles contribute nothing and are accepted as no-ops so
    callers can feed every outcome through one code path.  Truncated
    outcomes are rejected: the caller must discard the particle and
    record the truncation instead.
    """
    if outcome.truncated:
        raise StateError("truncated outcomes must be discarded, not applied")
    if outcome.escaped:
        return cluster
    site = outcome.freeze_site
    if site < 1:
        raise StateError(f"freeze at site {site} is impossible (no exposure below 1)")
    if site > cluster.rightmost + 1:
        raise StateError(
            f"freeze at {site} would advance the frontier past {cluster.rightmost + 1}"
        )
    if site == cluster.rightmost + 1:
        cluster.counts.append(0)
        cluster.rightmost = site
    if cluster.counts[site] >= cluster.capacity:
        raise StateError(f"site {site} is already at capacity {cluster.capacity}")
    cluster.counts[site] += 1
    cluster.particles_placed += 1
    if cluster.counts[site] == cluster.capacity:
        if cluster.blockage_site is None or site < cluster.blockage_site:
            cluster.blockage_site = site
    return cluster


def freeze_upon_arrival_of(trace, freeze_site: int) -> bool:
    """True iff the freeze site is strictly below every earlier site of the
    visit sequence (i.e. the particle froze on first reaching a new
    minimum).  ``trace`` ends at the freeze site."""
    sites = list(trace)
    if not sites or sites[-1] != freeze_site:
        raise ValueError("trace must end at the freeze site")
    return all(s > freeze_site for s in sites[:-1])


def _collapse_return(prob_back: float, rng) -> bool:
    """Outcome of an excursion into a zero-exposure half-line: True if the
    walker is back at the boundary, False if it escapes to infinity."""
    if prob_back >= 1.0:
        return True
    return rng.random() < prob_back


def run_particle_naive(
    index: int,
    cluster: ClusterState,
    params: ModelParams,
    rng,
    step_cap: int = 200_000,
    margin: int = 32,
) -> ParticleOutcome:
    """Literal walk of one arriving particle (ground-truth oracle).

    The particle appears at ``index + 2``, hops to ``index + 1``, and is
    then stepped visit by visit inside ``[-margin, rightmost + margin]``.
    Stepping beyond either edge enters a half-line with zero freeze
    exposure, where the excursion outcome is exact: return to the edge
    with probability 1 for the symmetric walk, else the classic ruin
    probability (and escape otherwise).  The same collapse places a
    start above the window at the top edge.

    The cluster is never modified here; commit outcomes with
    :func:`apply_freeze`.  ``step_cap`` bounds literal visits; exceeding
    it yields a truncated outcome that the caller must discard and
    count.
    """
    if margin < 1:
        raise ValueError("margin must be >= 1")
    if cluster.blockage_site is not None and params.stop_on_blockage:
        raise StateError("cluster is saturated; no further arrivals")
    n = params.n
    p = params.left_step_prob
    # Ruin probabilities for one net step toward the window.
    back_from_right = 1.0 if p >= 0.5 else p / (1.0 - p)
    back_from_left = 1.0 if p <= 0.5 else (1.0 - p) / p
    top = cluster.rightmost + margin
    entry_clamp = cluster.rightmost + 2

    start = index + 2
    pos = index + 1
    min_before = start  # minimum over strictly earlier positions
    if pos > top:
        # Free approach: first hit of the window happens at its top edge,
        # or never (directed walks drifting away), with ruin probability
        # back_from_right ** distance.
        if back_from_right < 1.0 and rng.random() >= back_from_right ** (pos - top):
            return ParticleOutcome(
                index=index,
                freeze_site=None,
                froze_upon_arrival=False,
                min_site=entry_clamp,
                visits=0,
            )
        min_before = top + 1
        pos = top

    visits = 0
    counts = cluster.counts
    rightmost = cluster.rightmost
    capacity = cluster.capacity
    while True:
        if visits >= step_cap:
            return ParticleOutcome(
                index=index,
                freeze_site=None,
                froze_upon_arrival=False,
                min_site=max(-1, min(min_before, pos, entry_clamp)),
                visits=visits,
                truncated=True,
            )
        visits += 1
        left = pos - 1
        c = counts[left] if 0 <= left <= rightmost else 0
        if c and 0 <= pos <= rightmost and counts[pos] >= capacity:
            c = 0  # target full: freeze suppressed (continue mode only)
        if c and rng.random() < c / n:
            upon = pos < min_before
            return ParticleOutcome(
                index=index,
                freeze_site=pos,
                froze_upon_arrival=upon,
                min_site=max(-1, min(min_before, pos, entry_clamp)),
                visits=visits,
            )
        if rng.random() < p:
            if pos == -margin:
                # Excursion below the window: exact collapse.
                min_before = -margin - 1
                if back_from_left < 1.0 and rng.random() >= back_from_left:
                    return ParticleOutcome(
                        index=index,
                        freeze_site=None,
                        froze_upon_arrival=False,
                        min_site=-1,
                        visits=visits,
                    )
            else:
                if pos < min_before:
                    min_before = pos
                pos -= 1
        else:
            if pos == top:
                # Excursion above the window: exact collapse.
                if pos < min_before:
                    min_before = pos
                if back_from_right < 1.0 and rng.random() >= back_from_right:
                    return ParticleOutcome(
                        index=index,
                        freeze_site=None,
                        froze_upon_arrival=False,
                        min_site=max(-1, min(min_before, entry_clamp)),
                        visits=visits,
                    )
            else:
                if pos < min_before:
                    min_before = pos
                pos += 1


def default_budget(n: int, base: int = 10_000) -> int:
    """Arrival budget schedule: base * 2**n.

    Saturation takes exponentially many particles in n, so a flat budget
    would silently bias large-n rows; the schedule grows instead and
    truncation is always surfaced.
    """
    return base * (2**n)


def resolve_budget(params: ModelParams) -> int:
    if params.max_particles is not None:
        return params.max_particles
    return default_budget(params.n)
