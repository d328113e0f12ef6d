"""FastAPI application wrapping the solver package."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from . import api
from .schemas import (
    CompareRequest,
    CompareResponse,
    HealthResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
    SynthRequest,
    SynthResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="shepso",
        version=__version__,
        description="Switching-angle optimization service for cascaded "
                    "H-bridge inverters: staircase harmonic elimination via "
                    "particle swarm, THD evaluation, DC-halving strategy sweeps.",
    )

    @app.exception_handler(ValueError)
    async def value_error_handler(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=SolveResponse)
    def solve_endpoint(req: SolveRequest) -> SolveResponse:
        return api.run_solve(req)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        return api.run_sweep(req)

    @app.post("/compare", response_model=CompareResponse)
    def compare_endpoint(req: CompareRequest) -> CompareResponse:
        return api.run_compare(req)

    @app.post("/synth", response_model=SynthResponse)
    def synth_endpoint(req: SynthRequest) -> SynthResponse:
        return api.run_synth(req)

    return app


app = create_app()
