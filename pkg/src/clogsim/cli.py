"""Command-line front door: a thin client over the service layer.

Each subcommand builds a request model, executes it (in process by
default, against a running service with ``--server URL``), and writes
the documented output files from the response.  All result-bearing
logic lives behind the service layer, so wire and in-process runs
produce byte-identical files.

Exit codes: 0 success; 1 invalid configuration or transport failure;
2 the validate subcommand produced a void or failed equivalence check.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, List, Optional

import httpx
from pydantic import ValidationError

from . import __version__, records
from .model import OccupancyError
from .service import handlers, schemas

INFORMAL_INIT = {0: 1, 1: 1}


def parse_int_list(text: str) -> List[int]:
    """Accept a single integer, a comma list, or an inclusive a:b range."""
    text = text.strip()
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    if "," in text:
        return [int(part) for part in text.split(",") if part.strip()]
    return [int(text)]


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, required=True, help="64-bit master seed")
    sub.add_argument(
        "--server",
        default=None,
        help="base URL of a running clogsim service; default runs in process",
    )
    sub.add_argument("-v", "--verbose", action="store_true", help="per-run log lines")


def _occupancy_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--informal-init",
        action="store_true",
        help="seed sites 0 and 1 with one particle each (default: only site 0)",
    )
    sub.add_argument(
        "--bias",
        type=float,
        default=0.5,
        metavar="P",
        help="left-step probability conditional on moving, in (0,1]; 0.5 = symmetric",
    )


def _dispatch(server: Optional[str], path: str, request, handler: Callable, response_cls):
    if server is None:
        return handler(request)
    resp = httpx.post(
        server.rstrip("/") + path,
        json=request.model_dump(mode="json"),
        timeout=None,
    )
    resp.raise_for_status()
    return response_cls.model_validate(resp.json())


def cmd_simulate(args: argparse.Namespace) -> int:
    occupancy = dict(INFORMAL_INIT) if args.informal_init else {0: 1}
    request = schemas.SimulateRequest(
        params=schemas.ParamsSchema(
            n=args.n,
            initial_occupancy=occupancy,
            left_step_prob=args.bias,
            max_particles=args.max_particles,
            stop_on_blockage=not args.continue_after_blockage,
        ),
        runs=args.runs,
        master_seed=args.seed,
        workers=args.workers,
    )
    response = _dispatch(args.server, "/simulate", request, handlers.simulate, schemas.SimulateResponse)
    records.write_jsonl(args.out, (r.model_dump() for r in response.records))
    records.write_metadata(args.out, response.metadata)
    blocked = sum(1 for r in response.records if r.B is not None)
    if args.verbose:
        for r in response.records:
            print(f"run {r.run_index}: B={r.B} particles={r.particles_used} escaped={r.escaped_count}")
    print(
        f"simulate n={args.n}: {len(response.records)} runs, {blocked} reached a blockage -> {args.out}"
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    request = schemas.SweepRequest(
        n_values=parse_int_list(args.n),
        runs=args.runs,
        master_seed=args.seed,
        budget_base=args.budget_base,
        workers=args.workers,
        saturation_sites=parse_int_list(args.s_sites),
        left_step_prob=args.bias,
        initial_occupancy=dict(INFORMAL_INIT) if args.informal_init else None,
    )
    response = _dispatch(args.server, "/sweep", request, handlers.run_sweep, schemas.SweepResponse)
    rows = [r.model_dump(exclude={"saturation"}) for r in response.rows]
    fit = None if response.fit is None else response.fit.model_dump()
    records.write_sweep_csv(args.out, rows, fit, response.fit_note)
    records.write_metadata(args.out, response.metadata)
    for r in response.rows:
        print(
            f"n={r.n}: runs={r.runs} median_B={r.median_B} "
            f"q25={r.q25_B} q75={r.q75_B} truncated={r.truncated_frac:.3f}"
        )
    if response.fit is not None:
        print(
            f"log-median fit: slope={response.fit.slope:.4f} "
            f"ci95=({response.fit.ci_low}, {response.fit.ci_high}) -> {args.out}"
        )
    else:
        print(f"fit: {response.fit_note or 'absent'} -> {args.out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    request = schemas.ValidateRequest(
        n=args.n,
        particles=args.particles,
        samples=args.samples,
        master_seed=args.seed,
        margins=parse_int_list(args.margins),
        step_cap=args.step_cap,
        left_step_prob=args.bias,
    )
    response = _dispatch(args.server, "/validate", request, handlers.run_validate, schemas.ValidateResponse)
    for pair in response.pairs:
        print(
            f"{pair.a} vs {pair.b}: combined_p={pair.combined_p:.5f} "
            f"tv={pair.tv:.5f} {'pass' if pair.passed else 'FAIL'}"
        )
    for margin, rate in sorted(response.naive_exclusion_rates.items(), key=lambda kv: int(kv[0])):
        print(f"naive margin {margin}: exclusion rate {rate:.5f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(response.model_dump(), sort_keys=True, indent=2))
            fh.write("\n")
    if response.void:
        print(f"VOID: {response.notes}")
        return 2
    if not response.passed:
        print("FAIL: engine distributions distinguishable")
        return 2
    print("pass: engines indistinguishable at configured thresholds")
    return 0


def cmd_lemma_stats(args: argparse.Namespace) -> int:
    request = schemas.LemmaStatsRequest(
        n_values=parse_int_list(args.n),
        site=args.site,
        min_qualifying=args.min_qualifying,
        master_seed=args.seed,
        max_runs=args.max_runs,
        batch_runs=args.batch_runs,
        workers=args.workers,
        prepared_start=not args.natural_start,
        budget=args.budget,
    )
    response = _dispatch(args.server, "/lemma-stats", request, handlers.lemma_stats, schemas.LemmaStatsResponse)
    records.write_jsonl(args.out, (r.model_dump() for r in response.results))
    records.write_metadata(args.out, response.metadata)
    for row in response.results:
        status = "inconclusive" if row.inconclusive else ("pass" if row.passed else "FAIL")
        print(
            f"n={row.n} site={row.site}: qualifying={row.qualifying} "
            f"freq={row.frequency} bound={row.bound} {status}"
        )
    print(f"-> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clogsim",
        description="Monte Carlo experiments on the one-dimensional clogging process",
    )
    parser.add_argument("--version", action="version", version=f"clogsim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="independent runs to first blockage, JSONL out")
    sim.add_argument("--n", type=int, required=True, help="per-site capacity")
    sim.add_argument("--runs", type=int, default=100)
    sim.add_argument(
        "--max-particles",
        type=int,
        default=None,
        help="arrival budget per run (default: 10000 * 2^n)",
    )
    sim.add_argument(
        "--continue-after-blockage",
        action="store_true",
        help="run to the arrival budget instead of halting at the first blockage",
    )
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", required=True, help="output JSONL path")
    _occupancy_flags(sim)
    _common_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = subs.add_parser("sweep", help="per-capacity sweep of blockage statistics, CSV out")
    sw.add_argument("--n", required=True, help="capacities: single, a:b range, or comma list")
    sw.add_argument("--runs", type=int, default=200, help="runs per capacity")
    sw.add_argument("--budget-base", type=int, default=10_000, help="budget = base * 2^n")
    sw.add_argument(
        "--s-sites",
        default="1",
        help="sites whose saturation frequency to estimate (comma list)",
    )
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", required=True, help="output CSV path")
    _occupancy_flags(sw)
    _common_flags(sw)
    sw.set_defaults(func=cmd_sweep)

    val = subs.add_parser("validate", help="fast engine vs literal oracle equivalence")
    val.add_argument("--n", type=int, default=3)
    val.add_argument("--particles", type=int, default=10, help="arrivals compared per sample run")
    val.add_argument("--samples", type=int, default=10_000, help="sample runs per engine")
    val.add_argument("--margins", default="2,8,32", help="literal-walk window margins")
    val.add_argument("--step-cap", type=int, default=200_000)
    val.add_argument("--out", default=None, help="optional JSON report path")
    _occupancy_flags(val)
    _common_flags(val)
    val.set_defaults(func=cmd_validate)

    lem = subs.add_parser(
        "lemma-stats",
        help="conditional upon-arrival freeze frequency at the half-capacity regime",
    )
    lem.add_argument("--n", default="4,8", help="capacities: single, a:b range, or comma list")
    lem.add_argument("--site", type=int, default=1, help="designated site k (checks k+1)")
    lem.add_argument("--min-qualifying", type=int, default=2000)
    lem.add_argument("--max-runs", type=int, default=20_000)
    lem.add_argument("--batch-runs", type=int, default=200)
    lem.add_argument("--budget", type=int, default=None, help="arrival budget per run")
    lem.add_argument(
        "--natural-start",
        action="store_true",
        help="sample plain runs instead of starting at half capacity",
    )
    lem.add_argument("--workers", type=int, default=1)
    lem.add_argument("--out", required=True, help="output JSONL path")
    _common_flags(lem)
    lem.set_defaults(func=cmd_lemma_stats)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        code = exc.code if exc.code is not None else 0
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except (OccupancyError, ValidationError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"service request failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
