"""Request/response models for the HTTP service.

The CLI builds the same request models and renders output files from
the same response models, so a file produced through the wire is byte
identical to one produced in process.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from ..model import ModelParams

MAX_SEED = 2**64 - 1


class ParamsSchema(BaseModel):
    n: int = Field(ge=1, description="per-site capacity")
    initial_occupancy: Dict[int, int] = Field(default_factory=lambda: {0: 1})
    left_step_prob: float = Field(default=0.5, gt=0.0, le=1.0)
    max_particles: Optional[int] = Field(default=None, ge=0)
    stop_on_blockage: bool = True

    def to_model(self) -> ModelParams:
        # ModelParams re-validates occupancy structure (raises OccupancyError).
        return ModelParams(
            n=self.n,
            initial_occupancy=dict(self.initial_occupancy),
            left_step_prob=self.left_step_prob,
            max_particles=self.max_particles,
            stop_on_blockage=self.stop_on_blockage,
        )

    def config_echo(self) -> Dict:
        # Canonical form for metadata: string site keys, sorted by site.
        occ = {str(k): self.initial_occupancy[k] for k in sorted(self.initial_occupancy)}
        return {
            "n": self.n,
            "initial_occupancy": occ,
            "left_step_prob": self.left_step_prob,
            "max_particles": self.max_particles,
            "stop_on_blockage": self.stop_on_blockage,
        }


class SimulateRequest(BaseModel):
    params: ParamsSchema
    runs: int = Field(default=100, ge=1)
    master_seed: int = Field(ge=0, le=MAX_SEED)
    workers: int = Field(default=1, ge=1, le=64)


class ProfileSummary(BaseModel):
    rightmost: int
    counts: List[int]
    counts_capped: bool


class RunRecordModel(BaseModel):
    # Field order here is the JSONL key order; keep in sync with
    # records.run_record.
    run_index: int
    seed: int
    n: int
    B: Optional[int]
    particles_used: int
    truncated: bool
    escaped_count: int
    profile_summary: ProfileSummary


class SimulateResponse(BaseModel):
    metadata: Dict
    records: List[RunRecordModel]


class SweepRequest(BaseModel):
    n_values: List[int] = Field(min_length=1)
    runs: int = Field(default=200, ge=1)
    master_seed: int = Field(ge=0, le=MAX_SEED)
    budget_base: int = Field(default=10_000, ge=1)
    workers: int = Field(default=1, ge=1, le=64)
    saturation_sites: List[int] = Field(default_factory=lambda: [1])
    left_step_prob: float = Field(default=0.5, gt=0.0, le=1.0)
    initial_occupancy: Optional[Dict[int, int]] = None

    @field_validator("n_values")
    @classmethod
    def _positive_n(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError("all n values must be >= 1")
        return v


class SaturationModel(BaseModel):
    site: int
    runs: int
    hits: int
    frequency: float
    ci_low: float
    ci_high: float


class SweepRowModel(BaseModel):
    n: int
    runs: int
    median_B: Optional[float]
    q25_B: Optional[float]
    q75_B: Optional[float]
    truncated_frac: float
    saturation: List[SaturationModel]


class FitModel(BaseModel):
    slope: float
    intercept: float
    stderr: float
    ci_low: Optional[float]
    ci_high: Optional[float]
    points: int


class SweepResponse(BaseModel):
    metadata: Dict
    rows: List[SweepRowModel]
    fit: Optional[FitModel]
    fit_note: str = ""


class ValidateRequest(BaseModel):
    n: int = Field(default=3, ge=1)
    particles: int = Field(default=10, ge=1)
    samples: int = Field(default=10_000, ge=10)
    master_seed: int = Field(ge=0, le=MAX_SEED)
    margins: List[int] = Field(default_factory=lambda: [2, 8, 32])
    step_cap: int = Field(default=200_000, ge=1)
    left_step_prob: float = Field(default=0.5, gt=0.0, le=1.0)

    @field_validator("margins")
    @classmethod
    def _positive_margins(cls, v: List[int]) -> List[int]:
        if not v or any(m < 1 for m in v):
            raise ValueError("margins must be a nonempty list of integers >= 1")
        return v


class PairModel(BaseModel):
    a: str
    b: str
    combined_p: float
    per_index_p: List[float]
    tv: float
    passed: bool


class ValidateResponse(BaseModel):
    metadata: Dict
    n: int
    particles: int
    samples: int
    pairs: List[PairModel]
    naive_exclusion_rates: Dict[str, float]
    void: bool
    passed: bool
    notes: str = ""


class LemmaStatsRequest(BaseModel):
    n_values: List[int] = Field(default_factory=lambda: [4, 8])
    site: int = Field(default=1, ge=1)
    min_qualifying: int = Field(default=2000, ge=1)
    master_seed: int = Field(ge=0, le=MAX_SEED)
    max_runs: int = Field(default=20_000, ge=1)
    batch_runs: int = Field(default=200, ge=1)
    workers: int = Field(default=1, ge=1, le=64)
    # Start from an occupancy already holding half capacity at the site
    # (qualifying particles accrue immediately); False samples plain runs.
    prepared_start: bool = True
    # Qualifying particles concentrate in the earliest arrivals (deep
    # penetration dies off as the cluster grows), so lemma runs use a
    # small arrival budget by default instead of running to blockage.
    budget: Optional[int] = Field(default=4096, ge=1)


class LemmaRowModel(BaseModel):
    n: int
    site: int
    qualifying: int
    successes: int
    frequency: Optional[float]
    se: Optional[float]
    bound: Optional[float]
    passed: Optional[bool]
    inconclusive: bool
    runs_used: int


class LemmaStatsResponse(BaseModel):
    metadata: Dict
    results: List[LemmaRowModel]


class HealthResponse(BaseModel):
    status: str
    version: str
