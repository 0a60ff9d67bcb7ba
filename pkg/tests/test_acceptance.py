"""Acceptance gate: every criterion at its stated tolerance.

Runs under one frozen master seed, so each verdict is deterministic.
Alongside the assertions this module writes the experiment artifacts
(sweep CSV, run-record JSONL, lemma JSONL, validation report) consumed
by the analysis package, under artifacts/acceptance/.
"""
import json
import math
import random
from pathlib import Path

import pytest

from clogsim import records
from clogsim.cli import main as cli_main
from clogsim.harness import run_many, run_to_blockage
from clogsim.model import ModelParams, WalkerState, init_cluster, transition_step
from clogsim.proofstats import compute_proof_quantities
from clogsim.rng import derive_seed
from clogsim.service import handlers, schemas

ACCEPT_SEED = 20260810
ARTIFACTS = Path(__file__).resolve().parents[1] / "artifacts" / "acceptance"


@pytest.fixture(scope="session")
def artifacts_dir():
    ARTIFACTS.mkdir(parents=True, exist_ok=True)
    return ARTIFACTS


@pytest.fixture(scope="session")
def acceptance_sweep(artifacts_dir):
    """The headline experiment: n=2..8, 300 runs each, budget 1e4 * 2^n."""
    request = schemas.SweepRequest(
        n_values=list(range(2, 9)),
        runs=300,
        master_seed=ACCEPT_SEED,
        budget_base=10_000,
        workers=8,
        saturation_sites=[1],
    )
    response = handlers.run_sweep(request)
    rows = [r.model_dump(exclude={"saturation"}) for r in response.rows]
    fit = None if response.fit is None else response.fit.model_dump()
    records.write_sweep_csv(artifacts_dir / "sweep.csv", rows, fit, response.fit_note)
    records.write_metadata(artifacts_dir / "sweep.csv", response.metadata)
    return response


@pytest.fixture(scope="session")
def acceptance_runs(artifacts_dir):
    """Per-capacity run records for the figure pipeline."""
    responses = {}
    for n in range(2, 7):
        request = schemas.SimulateRequest(
            params=schemas.ParamsSchema(n=n),
            runs=400,
            master_seed=derive_seed(ACCEPT_SEED, 50 + n),
            workers=8,
        )
        response = handlers.simulate(request)
        path = artifacts_dir / f"runs_n{n}.jsonl"
        records.write_jsonl(path, (r.model_dump() for r in response.records))
        records.write_metadata(path, response.metadata)
        responses[n] = response
    return responses


def test_criterion_1_per_visit_freeze_law(record_criterion):
    """Empirical first-visit freeze frequency within 4 SE of c/n, plus
    left/right symmetry of the non-freezing moves."""
    trials = 100_000
    rng = random.Random(derive_seed(ACCEPT_SEED, 1))
    worst = 0.0
    for n in (2, 4, 8):
        exposures = sorted({0, 1, math.ceil(n / 2), n - 1, n})
        for c in exposures:
            occupancy = {0: 1} if c == 0 else {0: 1, 1: c}
            params = ModelParams(n=n, initial_occupancy=occupancy)
            cluster = init_cluster(params)
            freezes = lefts = moves = 0
            for _ in range(trials):
                w = transition_step(WalkerState(position=2), cluster, params, rng)
                if w.frozen:
                    freezes += 1
                else:
                    moves += 1
                    lefts += w.position == 1
            p = c / n
            se = math.sqrt(p * (1 - p) / trials)
            dev = abs(freezes / trials - p)
            assert dev <= 4 * se, (n, c, freezes / trials)
            if se:
                worst = max(worst, dev / se)
            if moves:
                move_se = math.sqrt(0.25 / moves)
                assert abs(lefts / moves - 0.5) <= 4 * move_se, (n, c, lefts / moves)
    record_criterion(
        1, "per-visit freeze law c/n", True, f"15 (c,n) pairs, worst |dev| {worst:.2f} SE"
    )


def test_criterion_2_oracle_equivalence(record_criterion, artifacts_dir):
    """Fast vs literal oracle at margins 2/8/32: chi-square p > 1e-3,
    TV < 0.02, oracle truncation below 1%."""
    request = schemas.ValidateRequest(
        n=3,
        particles=10,
        samples=10_000,
        master_seed=derive_seed(ACCEPT_SEED, 2),
        margins=[2, 8, 32],
    )
    response = handlers.run_validate(request)
    with open(artifacts_dir / "validate.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(response.model_dump(), sort_keys=True, indent=2))
        fh.write("\n")
    assert not response.void, response.notes
    assert max(float(r) for r in response.naive_exclusion_rates.values()) < 0.01
    for pair in response.pairs:
        assert pair.combined_p > 1e-3, (pair.a, pair.b, pair.combined_p)
        assert pair.tv < 0.02, (pair.a, pair.b, pair.tv)
    worst_p = min(p.combined_p for p in response.pairs)
    worst_tv = max(p.tv for p in response.pairs)
    record_criterion(
        2,
        "fast/naive equivalence (margins 2,8,32)",
        True,
        f"min combined p {worst_p:.4f}, max TV {worst_tv:.4f}",
    )


def test_criterion_3_exponential_growth(record_criterion, acceptance_sweep):
    """Median blockage position strictly increasing in n; positive
    log-median slope with the 95% CI excluding zero."""
    medians = [row.median_B for row in acceptance_sweep.rows]
    assert all(m is not None for m in medians)
    assert all(b > a for a, b in zip(medians, medians[1:])), medians
    fit = acceptance_sweep.fit
    assert fit is not None and fit.slope > 0
    assert fit.ci_low is not None and fit.ci_low > 0
    record_criterion(
        3,
        "exponential growth of median blockage position",
        True,
        f"medians {medians}, slope {fit.slope:.3f}, ci ({fit.ci_low:.3f}, {fit.ci_high:.3f})",
    )


def test_saturation_decay_invariant(acceptance_sweep):
    # Saturation frequency at site 1 never increases with n, and the
    # endpoint confidence intervals do not overlap.
    estimates = [row.saturation[0] for row in acceptance_sweep.rows]
    freqs = [e.frequency for e in estimates]
    assert all(b <= a for a, b in zip(freqs, freqs[1:])), freqs
    assert estimates[0].ci_low > estimates[-1].ci_high


def test_criterion_4_lemma_ingredient(record_criterion, artifacts_dir):
    """Conditional upon-arrival freeze frequency at site 2 under the
    half-capacity regime: at least 0.5 - 4 SE with >= 2000 qualifiers."""
    request = schemas.LemmaStatsRequest(
        n_values=[4, 8],
        site=1,
        min_qualifying=2000,
        master_seed=derive_seed(ACCEPT_SEED, 4),
        workers=8,
    )
    response = handlers.lemma_stats(request)
    path = artifacts_dir / "lemma.jsonl"
    records.write_jsonl(path, (r.model_dump() for r in response.results))
    records.write_metadata(path, response.metadata)
    details = []
    for row in response.results:
        assert not row.inconclusive and row.qualifying >= 2000
        assert row.frequency >= row.bound, (row.n, row.frequency, row.bound)
        details.append(f"n={row.n}: freq {row.frequency:.4f} >= bound {row.bound:.4f}")
    record_criterion(4, "upon-arrival frequency at half capacity", True, "; ".join(details))


def test_criterion_5_run_level_inequalities(record_criterion):
    """Both designated-site inequalities hold at every recorded index of
    every logged run; zero violations permitted."""
    checked = with_half = 0
    for n, runs, budget in ((2, 120, 4000), (3, 120, 4000), (4, 120, 4000), (8, 30, 4096)):
        params = ModelParams(n=n, max_particles=budget)
        results = run_many(
            params, runs, derive_seed(ACCEPT_SEED, 500 + n), workers=8, log_outcomes=True
        )
        for site in (1, 2):
            for r in results:
                pq = compute_proof_quantities(r.log, site)
                assert pq.check_inequalities() == {
                    "count_bound": 0,
                    "arrival_bound": 0,
                }, (n, site, r.run_index)
                checked += 1
                with_half += pq.half_index is not None
    assert with_half > 0
    record_criterion(
        5,
        "run-level count/arrival inequalities",
        True,
        f"{checked} (run, site) checks, {with_half} with the half threshold reached",
    )


def test_criterion_6_degenerate_and_forced_cases(record_criterion):
    """Degenerate capacity, forced first freeze, freeze-site floor, and
    single-step frontier growth, on every run examined."""
    r = run_to_blockage(ModelParams(n=1), derive_seed(ACCEPT_SEED, 6))
    assert r.blockage_site == 0 and r.particles_used == 1
    r = run_to_blockage(
        ModelParams(n=1, initial_occupancy={0: 1, 1: 1}), derive_seed(ACCEPT_SEED, 7)
    )
    assert r.blockage_site == 0

    runs_checked = 0
    for n in (2, 3, 4):
        params = ModelParams(n=n, max_particles=3000)
        for r in run_many(params, 150, derive_seed(ACCEPT_SEED, 600 + n), log_outcomes=True):
            sites = r.log.sites
            frozen = sites[sites >= 0]
            assert len(frozen) == 0 or frozen.min() >= 1
            # First arrival has nowhere else to go: site 1, and replaying
            # the log shows the frontier never jumps.
            assert sites[0] == 1
            rightmost = 0
            for s in frozen:
                assert s <= rightmost + 1
                rightmost = max(rightmost, int(s))
            assert rightmost == r.rightmost
            runs_checked += 1
    record_criterion(
        6, "degenerate and forced cases", True, f"{runs_checked} runs replayed"
    )


def test_criterion_7_worker_determinism(record_criterion, tmp_path):
    """Worker counts 1 and 8 produce byte-identical JSONL and CSV."""
    pairs = []
    for workers in ("1", "8"):
        jsonl = tmp_path / f"runs_w{workers}.jsonl"
        rc = cli_main(
            ["simulate", "--n", "4", "--seed", str(ACCEPT_SEED), "--runs", "60",
             "--workers", workers, "--out", str(jsonl)]
        )
        assert rc == 0
        csv = tmp_path / f"sweep_w{workers}.csv"
        rc = cli_main(
            ["sweep", "--n", "2:5", "--runs", "80", "--seed", str(ACCEPT_SEED),
             "--workers", workers, "--out", str(csv)]
        )
        assert rc == 0
        pairs.append((jsonl, csv))
    (jsonl1, csv1), (jsonl8, csv8) = pairs
    assert jsonl1.read_bytes() == jsonl8.read_bytes()
    assert csv1.read_bytes() == csv8.read_bytes()
    assert records.meta_path(jsonl1).read_bytes() == records.meta_path(jsonl8).read_bytes()
    assert records.meta_path(csv1).read_bytes() == records.meta_path(csv8).read_bytes()
    record_criterion(7, "byte-identical output for 1 vs 8 workers", True, "JSONL and CSV")


def test_criterion_8_finiteness(record_criterion, acceptance_sweep):
    """Within budget 1e4 * 2^n, at least 99% of runs reach a blockage for
    n in {2, 3, 4}."""
    fractions = {}
    for row in acceptance_sweep.rows:
        if row.n in (2, 3, 4):
            assert row.truncated_frac <= 0.01, (row.n, row.truncated_frac)
            fractions[row.n] = 1.0 - row.truncated_frac
    record_criterion(
        8,
        "finiteness: runs reach a blockage within budget",
        True,
        f"completion fractions {fractions}",
    )


def test_artifacts_written_for_analysis(acceptance_sweep, acceptance_runs, artifacts_dir):
    # The analysis package consumes these; keep the inventory stable.
    expected = ["sweep.csv", "sweep.csv.meta.json"]
    expected += [f"runs_n{n}.jsonl" for n in range(2, 7)]
    for name in expected:
        assert (artifacts_dir / name).exists(), name
