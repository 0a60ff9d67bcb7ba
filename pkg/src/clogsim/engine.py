"""Collapsed-excursion sampler: exact in distribution, bounded work.

A fresh particle has zero freeze exposure everywhere right of the
frontier and everywhere below the origin, and the symmetric walk is
recurrent, so every excursion into those half-lines ends back at the
boundary with probability one.  The sampler therefore keeps the walker
inside ``[0, rightmost + 1]`` and replaces each boundary excursion with
its exact outcome: a guaranteed return in the symmetric walk, or a
ruin-probability draw (return vs. escape to infinity) for directed
walks.  Excursion durations are never sampled because no recorded
statistic depends on them; only visits to freeze-exposed sites matter.

Draw schema (shared verbatim with the jit kernel in :mod:`kernel`):

* directed walks with rightward drift draw one uniform per particle for
  the approach (enter with probability ``(p/(1-p)) ** distance``);
* one uniform per visit decides freeze / left / right in a single
  partition of [0, 1);
* a boundary excursion draws one extra uniform only in the regime where
  escape is possible (left drift below the origin, right drift beyond
  the frontier).

Everything here is single-threaded per run; independent runs with
independent streams parallelise freely.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import ClusterState, ModelParams, ParticleOutcome, StateError
from .rng import SplitMix64, pow_int


@dataclass
class CollapsedWalker:
    """Walker confined to the freeze-exposed interval.

    ``min_before`` is the minimum over all positions visited strictly
    before the current visit (the entry sentinel ``rightmost + 2`` means
    "nothing yet"); ``went_below_zero`` records that some excursion
    dipped under the origin, which rules out any later freeze being
    upon-arrival.
    """

    position: int
    min_before: int
    went_below_zero: bool = False
    visits: int = 0


def entry_site(cluster: ClusterState) -> int:
    """First site where an arriving particle has positive freeze exposure.

    The approach from the start position down to ``rightmost + 1`` runs
    entirely through zero-exposure sites, so it is collapsed away.
    """
    if cluster.blockage_site is not None:
        raise StateError("cluster is saturated; no further arrivals")
    return cluster.rightmost + 1


def collapse_right(walker: CollapsedWalker, params: ModelParams, rng: SplitMix64) -> bool:
    """Collapse an excursion to the right of the entry site.

    Returns True when the walker is back at its position (counted as a
    new visit by the caller); False when it escapes to +infinity, which
    has positive probability only for rightward drift
    (return probability p / (1 - p)).
    """
    p = params.left_step_prob
    if walker.position < walker.min_before:
        walker.min_before = walker.position
    if p >= 0.5:
        return True
    return rng.random() < p / (1.0 - p)


def collapse_left(walker: CollapsedWalker, params: ModelParams, rng: SplitMix64) -> bool:
    """Collapse an excursion below the origin.

    The excursion visits negative sites, so the path minimum drops below
    zero and no later freeze can be upon-arrival.  Returns False on
    escape to -infinity (possible only for leftward drift; return
    probability (1 - p) / p).
    """
    p = params.left_step_prob
    walker.went_below_zero = True
    walker.min_before = -1
    if p <= 0.5:
        return True
    return rng.random() < (1.0 - p) / p


def approach_reaches_cluster(distance: int, params: ModelParams, rng: SplitMix64) -> bool:
    """Whether the free walk from the start position ever reaches the
    entry site ``distance`` steps below it (certain unless the drift
    points away from the cluster)."""
    p = params.left_step_prob
    if p >= 0.5 or distance <= 0:
        return True
    return rng.random() < pow_int(p / (1.0 - p), distance)


def run_particle_fast(
    index: int, cluster: ClusterState, params: ModelParams, rng: SplitMix64
) -> ParticleOutcome:
    """Sample one arriving particle's fate; distribution identical to
    :func:`clogsim.model.run_particle_naive` for any margin.

    Always terminates: the interval is finite and the frontier site
    keeps exposure >= 1/n per visit.  The cluster is not modified.
    """
    if cluster.blockage_site is not None and params.stop_on_blockage:
        raise StateError("cluster is saturated; no further arrivals")
    entry = cluster.rightmost + 1
    if index + 1 < entry:
        raise StateError(
            f"particle {index} would start at {index + 2}, left of entry {entry}"
        )
    n = params.n
    p = params.left_step_prob

    if not approach_reaches_cluster(index + 1 - entry, params, rng):
        return ParticleOutcome(
            index=index,
            freeze_site=None,
            froze_upon_arrival=False,
            min_site=entry + 1,
            visits=0,
        )

    walker = CollapsedWalker(position=entry, min_before=entry + 1)
    while True:
        walker.visits += 1
        pos = walker.position
        c = cluster.freeze_exposure(pos)
        u = rng.random()
        freeze_p = c / n
        if u < freeze_p:
            return ParticleOutcome(
                index=index,
                freeze_site=pos,
                froze_upon_arrival=pos < walker.min_before,
                min_site=max(-1, min(walker.min_before, pos)),
                visits=walker.visits,
            )
        if u < freeze_p + (1.0 - freeze_p) * p:
            if pos == 0:
                if not collapse_left(walker, params, rng):
                    return ParticleOutcome(
                        index=index,
                        freeze_site=None,
                        froze_upon_arrival=False,
                        min_site=-1,
                        visits=walker.visits,
                    )
            else:
                if pos < walker.min_before:
                    walker.min_before = pos
                walker.position = pos - 1
        else:
            if pos == entry:
                if not collapse_right(walker, params, rng):
                    return ParticleOutcome(
                        index=index,
                        freeze_site=None,
                        froze_upon_arrival=False,
                        min_site=max(-1, walker.min_before),
                        visits=walker.visits,
                    )
            else:
                if pos < walker.min_before:
                    walker.min_before = pos
                walker.position = pos + 1
