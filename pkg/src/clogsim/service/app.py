"""FastAPI app exposing the harness over HTTP.

Run with ``uvicorn clogsim.service.app:app``.  The CLI is a thin client
of these endpoints (in process by default, over the wire with
``--server``).
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..model import OccupancyError
from . import handlers, schemas

app = FastAPI(
    title="clogsim",
    description="Monte Carlo service for the one-dimensional clogging process",
    version=__version__,
)


@app.get("/healthz", response_model=schemas.HealthResponse)
def healthz() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
    try:
        return handlers.simulate(request)
    except OccupancyError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/sweep", response_model=schemas.SweepResponse)
def sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
    try:
        return handlers.run_sweep(request)
    except OccupancyError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/validate", response_model=schemas.ValidateResponse)
def validate(request: schemas.ValidateRequest) -> schemas.ValidateResponse:
    try:
        return handlers.run_validate(request)
    except OccupancyError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/lemma-stats", response_model=schemas.LemmaStatsResponse)
def lemma_stats(request: schemas.LemmaStatsRequest) -> schemas.LemmaStatsResponse:
    try:
        return handlers.lemma_stats(request)
    except OccupancyError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
