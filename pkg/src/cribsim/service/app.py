"""HTTP facade over the simulation package.

The service is stateless: request bodies carry configuration text, and
responses carry the produced artifacts as strings, so the process needs
no shared disk with its clients.  Domain errors map to 422 (the request
itself is wrong) and resolution/window errors to 409 (the request is
well-formed but the configured grids cannot honour it); both responses
carry the exception class name so thin clients can translate them back
into exit codes.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..acceptance import run_all
from ..config import parse_config
from ..errors import (
    ConfigError,
    CribsimError,
    DomainError,
    GridError,
    GridMismatchError,
    KindError,
    NormalizationError,
    RangeError,
    ResolutionError,
    SeparationError,
    WindowError,
    ZeroEchoError,
)
from ..feasibility import feasibility_report
from ..runner import simulate_run, sweep_run
from .schemas import (
    CriterionModel,
    FeasibilityRequest,
    FeasibilityResponse,
    HealthResponse,
    SelftestRequest,
    SelftestResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)

_INVALID_REQUEST = (
    ConfigError,
    DomainError,
    NormalizationError,
    SeparationError,
    KindError,
    RangeError,
)
_UNRESOLVABLE = (
    ResolutionError,
    WindowError,
    GridError,
    GridMismatchError,
    ZeroEchoError,
)


def _http_error(exc: CribsimError) -> HTTPException:
    status = 422 if isinstance(exc, _INVALID_REQUEST) else 409
    return HTTPException(
        status_code=status,
        detail={"error": type(exc).__name__, "message": str(exc)},
    )


def _read_artifacts(files: dict[str, Path]) -> dict[str, str]:
    return {path.name: path.read_text(encoding="utf-8") for path in files.values()}


def create_app() -> FastAPI:
    app = FastAPI(title="cribsim", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        try:
            config = parse_config(request.config)
            with tempfile.TemporaryDirectory() as scratch:
                artifacts = simulate_run(config, out_dir=scratch)
                files = _read_artifacts(artifacts.files)
            return SimulateResponse(metrics=artifacts.metrics, files=files)
        except CribsimError as exc:
            raise _http_error(exc) from exc

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        try:
            config = parse_config(request.config)
            with tempfile.TemporaryDirectory() as scratch:
                artifacts = sweep_run(
                    config,
                    mode=request.mode,
                    threads=request.threads,
                    out_dir=scratch,
                )
                files = _read_artifacts(artifacts.files)
            return SweepResponse(
                files=files,
                rows=artifacts.rows,
                max_rel_residual=artifacts.max_rel_residual,
            )
        except CribsimError as exc:
            raise _http_error(exc) from exc

    @app.post("/feasibility", response_model=FeasibilityResponse)
    def feasibility(request: FeasibilityRequest) -> FeasibilityResponse:
        try:
            report = feasibility_report(
                linewidth_Hz=request.linewidth_Hz,
                max_broadening_Hz=request.max_broadening_Hz,
                stark_coeff_Hz_per_Vcm=request.stark_coeff_Hz_per_Vcm,
                field_V_per_cm=request.field_V_per_cm,
                demonstrated_efficiency=request.demonstrated_efficiency,
                bandwidth_multiple=request.bandwidth_multiple,
            )
            return FeasibilityResponse(report=report)
        except CribsimError as exc:
            raise _http_error(exc) from exc

    @app.post("/selftest", response_model=SelftestResponse)
    def selftest(request: SelftestRequest) -> SelftestResponse:
        try:
            results = run_all(request.criteria)
        except ValueError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "ValueError", "message": str(exc)},
            ) from exc
        return SelftestResponse(
            passed=all(r.passed for r in results),
            results=[
                CriterionModel(
                    number=r.number,
                    label=r.label,
                    passed=r.passed,
                    detail=r.detail,
                    line=r.line(),
                )
                for r in results
            ],
        )

    return app


app = create_app()
