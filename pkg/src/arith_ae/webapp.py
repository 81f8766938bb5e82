"""HTTP service exposing the pipelines.

Error mapping: capacity problems are 413 (the requested range cannot be
sieved under the configured cap), bad arguments and kernel domain errors
are 400, and internal invariant violations (mathematically impossible
relations observed, meaning a bug) are 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import pipelines
from .errors import ArithAEError, CapacityError, InternalInvariantError
from .schemas import (
    ClassifyRequest,
    ClassifyResponse,
    ConcentrationRequest,
    ConcentrationResponse,
    FunctionsResponse,
    HealthResponse,
    PrimesumsRequest,
    PrimesumsResponse,
    StatsRequest,
    StatsResponse,
)


def _status_for(exc: ArithAEError) -> int:
    if isinstance(exc, CapacityError):
        return 413
    if isinstance(exc, InternalInvariantError):
        return 500
    return 400


def create_app() -> FastAPI:
    app = FastAPI(
        title="arith-ae",
        description=(
            "Empirical moments, asymptotic predictions, and almost-everywhere "
            "classification of additive and multiplicative arithmetic functions"
        ),
        version="0.1.0",
    )

    @app.exception_handler(ArithAEError)
    async def _domain_error(request: Request, exc: ArithAEError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return pipelines.run_health()

    @app.get("/functions", response_model=FunctionsResponse)
    def functions_catalog() -> FunctionsResponse:
        return pipelines.run_functions()

    @app.post("/stats", response_model=StatsResponse)
    def stats(req: StatsRequest) -> StatsResponse:
        return pipelines.run_stats(req)

    @app.post("/primesums", response_model=PrimesumsResponse)
    def primesums(req: PrimesumsRequest) -> PrimesumsResponse:
        return pipelines.run_primesums(req)

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest) -> ClassifyResponse:
        return pipelines.run_classify(req)

    @app.post("/concentration", response_model=ConcentrationResponse)
    def concentration(req: ConcentrationRequest) -> ConcentrationResponse:
        return pipelines.run_concentration(req)

    return app


app = create_app()
