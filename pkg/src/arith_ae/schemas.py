"""Request and response models shared by the HTTP service and the CLI.

The CLI renders CSV/JSON from these models whether it computed locally or
fetched from a server, so both paths produce identical bytes.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from .predictor import Law, Weighting

DEFAULT_N = 1_000_000


class StatsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: str
    n: int = Field(default=DEFAULT_N, ge=1)
    grid: str = "geometric"
    b: float = Field(default=2.0, gt=0)
    xi: float = Field(default=0.25, gt=0, le=1)
    weighting: Weighting = Weighting.PLAIN_RECIPROCAL
    workers: int = Field(default=1, ge=1)
    chunk: int | None = Field(default=None, ge=1)


class CompareRow(BaseModel):
    n: int
    mean: float
    variance: float
    a_n: float
    a_n_star: float
    d_n: float
    d_n_star: float
    mean_drift: float
    cheb_fraction: float
    env_violation: float


class StatsResponse(BaseModel):
    fn: str
    log_reduced: bool
    weighting: Weighting
    b: float
    xi: float
    rows: list[CompareRow]


class PrimesumsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    law: Law
    n: int = Field(default=DEFAULT_N, ge=3)
    grid: str = "geometric"
    powers: bool = False


class DriftRowOut(BaseModel):
    x: int
    sum: float
    reference: float
    drift: float
    stabilization: float


class PrimesumsResponse(BaseModel):
    law: Law
    powers: bool
    rows: list[DriftRowOut]


class ClassifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: str
    n: int = Field(default=DEFAULT_N, ge=100)
    grid: str = "geometric"
    xi: float = Field(default=0.25, gt=0, le=1)
    weighting: Weighting = Weighting.PLAIN_RECIPROCAL
    workers: int = Field(default=1, ge=1)
    chunk: int | None = Field(default=None, ge=1)


class CertificateOut(BaseModel):
    bound_kind: str
    constant: float | None
    checked_up_to: int


class ProbeOut(BaseModel):
    checkpoints: list[int]
    partial_sums: list[float]
    rho: float
    verdict: str


class PredictionsOut(BaseModel):
    n: int
    a_n: float
    a_n_star: float
    d_n: float
    d_n_star: float
    weighting: Weighting


class StatementOut(BaseModel):
    form_id: str
    n: int
    xi: float
    leading_term: float
    error_envelope: float
    exponentiated: bool
    text: str


class ClassifyResponse(BaseModel):
    fn: str
    mode: str
    strong: bool
    n: int
    xi: float
    class_t: str
    class_m: str
    assertions: list[str]
    regime: str
    narrative: str
    certificate: CertificateOut
    checkpoints: list[int]
    predictions: PredictionsOut | None
    empirical_mean: float | None
    empirical_variance: float | None
    kernel_tail: float
    kernel_all_zero: bool
    probe: ProbeOut | None
    ratio_track: list[float]
    statement: StatementOut


class ConcentrationRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: str
    n: int = Field(default=DEFAULT_N, ge=1)
    grid: str = "geometric"
    b: list[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    workers: int = Field(default=1, ge=1)
    chunk: int | None = Field(default=None, ge=1)


class ConcentrationRow(BaseModel):
    n: int
    b: float
    radius: float
    inside_fraction: float
    chebyshev_bound: float


class ConcentrationResponse(BaseModel):
    fn: str
    log_reduced: bool
    rows: list[ConcentrationRow]


class FunctionEntry(BaseModel):
    id: str
    mode: str
    strong: bool
    kernel: str
    summary: str


class FunctionsResponse(BaseModel):
    functions: list[FunctionEntry]


class HealthResponse(BaseModel):
    status: str
    capacity: int
    cached_limit: int | None


class ErrorBody(BaseModel):
    error: str
    message: str
