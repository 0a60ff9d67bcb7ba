"""Request handlers shared by the HTTP routes and the in-process CLI."""
from __future__ import annotations

import dataclasses
import math
from typing import Dict, List

from .. import records
from ..harness import (
    RunResult,
    SweepConfig,
    run_many,
    sweep,
)
from ..model import ModelParams
from ..proofstats import lemma_ingredient_check, thresholds_for
from ..rng import derive_seed
from ..validate import validate_engines
from . import schemas


def _record_model(result: RunResult) -> schemas.RunRecordModel:
    raw = records.run_record(result)
    return schemas.RunRecordModel(
        run_index=raw["run_index"],
        seed=raw["seed"],
        n=raw["n"],
        B=raw["B"],
        particles_used=raw["particles_used"],
        truncated=raw["truncated"],
        escaped_count=raw["escaped_count"],
        profile_summary=schemas.ProfileSummary(**raw["profile_summary"]),
    )


def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
    params = request.params.to_model()
    results = run_many(params, request.runs, request.master_seed, workers=request.workers)
    config = {
        "params": request.params.config_echo(),
        "runs": request.runs,
    }
    meta = records.metadata_block(
        "simulate", request.master_seed, config, records.RUN_RECORDS_SCHEMA
    )
    return schemas.SimulateResponse(
        metadata=meta, records=[_record_model(r) for r in results]
    )


def run_sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
    config = SweepConfig(
        n_values=list(request.n_values),
        runs=request.runs,
        master_seed=request.master_seed,
        budget_base=request.budget_base,
        workers=request.workers,
        saturation_sites=list(request.saturation_sites),
        left_step_prob=request.left_step_prob,
        initial_occupancy=dict(request.initial_occupancy)
        if request.initial_occupancy
        else None,
    )
    summary = sweep(config)
    rows = [
        schemas.SweepRowModel(
            n=row.n,
            runs=row.runs,
            median_B=row.median_B,
            q25_B=row.q25_B,
            q75_B=row.q75_B,
            truncated_frac=row.truncated_frac,
            saturation=[
                schemas.SaturationModel(**dataclasses.asdict(est))
                for est in (row.saturation[s] for s in sorted(row.saturation))
            ],
        )
        for row in summary.rows
    ]
    fit = None if summary.fit is None else schemas.FitModel(**summary.fit.to_dict())
    occ = request.initial_occupancy or {0: 1}
    config_echo = {
        "n_values": list(request.n_values),
        "runs": request.runs,
        "budget_base": request.budget_base,
        "saturation_sites": list(request.saturation_sites),
        "left_step_prob": request.left_step_prob,
        "initial_occupancy": {str(k): occ[k] for k in sorted(occ)},
    }
    meta = records.metadata_block(
        "sweep", request.master_seed, config_echo, records.SWEEP_CSV_SCHEMA
    )
    return schemas.SweepResponse(
        metadata=meta, rows=rows, fit=fit, fit_note=summary.fit_note
    )


def run_validate(request: schemas.ValidateRequest) -> schemas.ValidateResponse:
    report = validate_engines(
        n=request.n,
        particles=request.particles,
        samples=request.samples,
        master_seed=request.master_seed,
        margins=tuple(request.margins),
        step_cap=request.step_cap,
        left_step_prob=request.left_step_prob,
    )
    config_echo = {
        "n": request.n,
        "particles": request.particles,
        "samples": request.samples,
        "margins": list(request.margins),
        "step_cap": request.step_cap,
        "left_step_prob": request.left_step_prob,
    }
    meta = records.metadata_block(
        "validate", request.master_seed, config_echo, records.VALIDATE_REPORT_SCHEMA
    )
    return schemas.ValidateResponse(
        metadata=meta,
        n=report.n,
        particles=report.particles,
        samples=report.samples,
        pairs=[
            schemas.PairModel(
                a=p.name_a,
                b=p.name_b,
                combined_p=p.combined_p,
                per_index_p=p.per_index_p,
                tv=p.tv,
                passed=p.passed,
            )
            for p in report.pairs
        ],
        naive_exclusion_rates={str(k): v for k, v in report.naive_exclusion_rates.items()},
        void=report.void,
        passed=report.passed,
        notes=report.notes,
    )


def prepared_occupancy(n: int, site: int) -> Dict[int, int]:
    """Occupancy that already holds half capacity at the designated site
    (single particles on every site left of it keep the cluster solid)."""
    occ = {s: 1 for s in range(site)}
    occ[site] = thresholds_for(n)["half"]
    occ[0] = max(occ.get(0, 1), 1)
    return occ


def lemma_stats(request: schemas.LemmaStatsRequest) -> schemas.LemmaStatsResponse:
    results: List[schemas.LemmaRowModel] = []
    for n in request.n_values:
        occupancy = (
            prepared_occupancy(n, request.site) if request.prepared_start else {0: 1}
        )
        params = ModelParams(
            n=n,
            initial_occupancy=occupancy,
            max_particles=request.budget,
        )
        logs = []
        runs_done = 0
        stats = None
        master = derive_seed(request.master_seed, n)
        while runs_done < request.max_runs:
            batch = min(request.batch_runs, request.max_runs - runs_done)
            batch_results = run_many(
                params,
                batch,
                derive_seed(master, runs_done),
                workers=request.workers,
                log_outcomes=True,
            )
            logs.extend(r.log for r in batch_results)
            runs_done += batch
            stats = lemma_ingredient_check(
                logs, request.site, min_qualifying=request.min_qualifying
            )
            if stats.qualifying >= request.min_qualifying:
                break
        results.append(
            schemas.LemmaRowModel(
                n=n,
                site=stats.site,
                qualifying=stats.qualifying,
                successes=stats.successes,
                frequency=stats.frequency,
                se=stats.standard_error,
                bound=stats.bound,
                passed=stats.passed,
                inconclusive=stats.inconclusive,
                runs_used=stats.runs_used,
            )
        )
    config_echo = {
        "n_values": list(request.n_values),
        "site": request.site,
        "min_qualifying": request.min_qualifying,
        "max_runs": request.max_runs,
        "batch_runs": request.batch_runs,
        "prepared_start": request.prepared_start,
        "budget": request.budget,
    }
    meta = records.metadata_block(
        "lemma-stats", request.master_seed, config_echo, records.LEMMA_RECORDS_SCHEMA
    )
    return schemas.LemmaStatsResponse(metadata=meta, results=results)
