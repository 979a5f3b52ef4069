"""FastAPI application exposing the toolkit as a service."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..evidence import FleetLogError
from . import ops
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(
        title="provenuse",
        description=(
            "Failure-process simulation, Poisson-assumption validation, and "
            "proven-in-use SIL claim evaluation"
        ),
    )

    @app.get("/health", response_model=sc.HealthResponse)
    def health() -> sc.HealthResponse:
        return ops.health()

    @app.post("/simulate", response_model=sc.SimulateResponse)
    def simulate(req: sc.SimulateRequest) -> sc.SimulateResponse:
        return _run(ops.simulate, req)

    @app.post("/validate", response_model=sc.ValidateResponse)
    def validate(req: sc.ValidateRequest) -> sc.ValidateResponse:
        return _run(ops.validate, req)

    @app.post("/claim", response_model=sc.ClaimResponse)
    def claim(req: sc.ClaimRequest) -> sc.ClaimResponse:
        return _run(ops.claim, req)

    @app.post("/convergence", response_model=sc.ConvergenceResponse)
    def convergence(req: sc.ConvergenceRequest) -> sc.ConvergenceResponse:
        return _run(ops.convergence, req)

    return app


def _run(fn, req):
    try:
        return fn(req)
    except (FleetLogError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


app = create_app()
