import math
import random

import pytest

from clogsim.engine import (
    CollapsedWalker,
    approach_reaches_cluster,
    collapse_left,
    collapse_right,
    entry_site,
    run_particle_fast,
)
from clogsim.model import ModelParams, StateError, init_cluster
from clogsim.rng import SplitMix64, derive_seed


def _cluster(occupancy, n):
    return init_cluster(ModelParams(n=n, initial_occupancy=occupancy))


class TestEntrySite:
    def test_single_seed(self):
        assert entry_site(_cluster({0: 1}, 4)) == 1

    def test_contiguous(self):
        assert entry_site(_cluster({0: 1, 1: 1, 2: 3}, 4)) == 3

    def test_hole_behind_frontier(self):
        assert entry_site(_cluster({0: 1, 2: 2}, 4)) == 3

    def test_rejects_saturated_cluster(self):
        with pytest.raises(StateError):
            entry_site(_cluster({0: 1}, 1))


def _literal_return_probability(p_toward, start_distance, trials, seed, cap=20_000):
    """Literal biased walk oracle: frequency of ever stepping net
    `start_distance` toward the target before the cap."""
    rng = random.Random(seed)
    returns = 0
    for _ in range(trials):
        pos = start_distance
        for _ in range(cap):
            pos += -1 if rng.random() < p_toward else 1
            if pos == 0:
                returns += 1
                break
    return returns / trials


class TestCollapses:
    def test_symmetric_always_returns(self):
        params = ModelParams(n=2)
        rng = SplitMix64(1)
        w = CollapsedWalker(position=3, min_before=4)
        before = rng.state
        assert collapse_right(w, params, rng) is True
        assert rng.state == before  # certain returns consume no draw
        assert w.min_before == 3
        w0 = CollapsedWalker(position=0, min_before=1)
        assert collapse_left(w0, params, rng) is True
        assert w0.went_below_zero and w0.min_before == -1

    def test_rightward_drift_escape_rate(self):
        p = 0.4
        params = ModelParams(n=2, left_step_prob=p)
        rng = SplitMix64(2)
        trials = 100_000
        returns = sum(
            collapse_right(CollapsedWalker(position=3, min_before=4), params, rng)
            for _ in range(trials)
        )
        expected = p / (1 - p)
        se = math.sqrt(expected * (1 - expected) / trials)
        assert abs(returns / trials - expected) < 4 * se

    def test_ruin_formula_against_literal_walk(self):
        # Gambler's-ruin cross-check with a capped literal simulation.
        for p, seed in [(0.4, 11), (0.35, 12)]:
            literal = _literal_return_probability(p, 1, 40_000, seed)
            assert abs(literal - p / (1 - p)) < 4 * math.sqrt(
                (p / (1 - p)) * (1 - p / (1 - p)) / 40_000
            )

    def test_leftward_drift_escape_below_zero(self):
        p = 0.7
        params = ModelParams(n=2, left_step_prob=p)
        rng = SplitMix64(3)
        trials = 100_000
        returns = sum(
            collapse_left(CollapsedWalker(position=0, min_before=1), params, rng)
            for _ in range(trials)
        )
        expected = (1 - p) / p
        se = math.sqrt(expected * (1 - expected) / trials)
        assert abs(returns / trials - expected) < 4 * se
        # Literal mirror: walking up out of the hole with probability 1-p.
        literal = _literal_return_probability(1 - p, 1, 40_000, seed=13)
        assert abs(literal - expected) < 4 * math.sqrt(expected * (1 - expected) / 40_000)

    def test_approach_enters_certainly_when_symmetric(self):
        params = ModelParams(n=2)
        rng = SplitMix64(4)
        assert all(approach_reaches_cluster(d, params, rng) for d in range(0, 50))

    def test_approach_escape_depends_on_distance(self):
        p = 0.4
        params = ModelParams(n=2, left_step_prob=p)
        trials = 50_000
        for d in (1, 3):
            rng = SplitMix64(100 + d)
            enters = sum(approach_reaches_cluster(d, params, rng) for _ in range(trials))
            expected = (p / (1 - p)) ** d
            se = math.sqrt(expected * (1 - expected) / trials)
            assert abs(enters / trials - expected) < 4 * se


class TestRunParticleFast:
    def test_forced_freeze_site(self):
        params = ModelParams(n=2)
        for i in range(500):
            out = run_particle_fast(2, _cluster({0: 1}, 2), params, SplitMix64(derive_seed(7, i)))
            assert out.freeze_site == 1 and out.visits >= 1

    def test_first_visit_upon_arrival_half(self):
        params = ModelParams(n=2)
        trials = 100_000
        hits = 0
        for i in range(trials):
            out = run_particle_fast(2, _cluster({0: 1}, 2), params, SplitMix64(derive_seed(8, i)))
            hits += out.froze_upon_arrival
        se = math.sqrt(0.25 / trials)
        assert abs(hits / trials - 0.5) < 4 * se

    def test_rejects_start_inside_cluster(self):
        params = ModelParams(n=4)
        cluster = _cluster({0: 1, 1: 1, 2: 1, 3: 1}, 4)
        with pytest.raises(StateError):
            run_particle_fast(1, cluster, params, SplitMix64(0))

    def test_rejects_saturated_cluster(self):
        params = ModelParams(n=1)
        with pytest.raises(StateError):
            run_particle_fast(2, _cluster({0: 1}, 1), params, SplitMix64(0))

    def test_min_site_values_are_clamped(self):
        params = ModelParams(n=2)
        mins = set()
        for i in range(3000):
            out = run_particle_fast(2, _cluster({0: 1}, 2), params, SplitMix64(derive_seed(9, i)))
            mins.add(out.min_site)
        assert mins <= {-1, 0, 1}

    def test_directed_escape_outcomes(self):
        params = ModelParams(n=2, left_step_prob=0.3)
        outs = [
            run_particle_fast(9, _cluster({0: 1}, 2), params, SplitMix64(derive_seed(10, i)))
            for i in range(5000)
        ]
        escaped = [o for o in outs if o.escaped]
        assert len(escaped) > 4000  # start distance 9 with strong right drift
        assert all(o.freeze_site is None and not o.froze_upon_arrival for o in escaped)
        approach_escapes = [o for o in escaped if o.visits == 0]
        assert approach_escapes and all(o.min_site == 2 for o in approach_escapes)

    def test_visit_cost_report(self, capsys):
        # Throughput context, reported rather than asserted: mean visits
        # per particle against frontier * capacity.
        import numpy as np

        rows = []
        for n in (2, 4, 8):
            params = ModelParams(n=n)
            cluster = _cluster({0: 1}, n)
            rng = SplitMix64(derive_seed(12, n))
            visits = []
            from clogsim.model import apply_freeze

            for j in range(2, 400):
                out = run_particle_fast(j, cluster, params, rng)
                visits.append(out.visits)
                apply_freeze(cluster, out)
                if cluster.blockage_site is not None:
                    break
            rows.append((n, cluster.rightmost, float(np.mean(visits))))
        coeffs = np.polyfit([r[0] * r[1] for r in rows], [r[2] for r in rows], 1)
        print(f"visit cost report: rows={rows} linear-fit={coeffs.round(4).tolist()}")
        assert all(r[2] > 0 for r in rows)

    def test_leftward_drift_freezes_or_escapes_left(self):
        params = ModelParams(n=4, left_step_prob=0.9)
        outs = [
            run_particle_fast(2, _cluster({0: 1}, 4), params, SplitMix64(derive_seed(11, i)))
            for i in range(5000)
        ]
        frozen = [o for o in outs if not o.escaped]
        assert all(o.freeze_site == 1 for o in frozen)
        left_escapes = [o for o in outs if o.escaped]
        assert left_escapes and all(o.min_site == -1 for o in left_escapes)
