"""FastAPI application wrapping the handler layer."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..expr import EvalError, ParseError
from ..timescale import DescriptorError, NotInScaleError
from . import handlers
from . import models as m


def create_app() -> FastAPI:
    app = FastAPI(
        title="deltascale",
        version=__version__,
        description="Riemann delta-calculus on time scales: integrals, kernel transforms, dual-space tools.",
    )

    @app.exception_handler(ParseError)
    async def _parse_error(_: Request, exc: ParseError) -> JSONResponse:
        body = m.ErrorResponse(error="parse-error", detail=str(exc), offset=exc.offset)
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(DescriptorError)
    async def _descriptor_error(_: Request, exc: DescriptorError) -> JSONResponse:
        body = m.ErrorResponse(error="descriptor-error", detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(NotInScaleError)
    async def _scale_error(_: Request, exc: NotInScaleError) -> JSONResponse:
        body = m.ErrorResponse(error="not-in-scale", detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(EvalError)
    async def _eval_error(_: Request, exc: EvalError) -> JSONResponse:
        body = m.ErrorResponse(error="eval-error", detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        body = m.ErrorResponse(error="invalid-config", detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.get("/health", response_model=m.HealthResponse)
    def health() -> m.HealthResponse:
        return m.HealthResponse(version=__version__)

    @app.post("/integrate", response_model=m.IntegrateResponse, response_model_exclude_none=True)
    def integrate(req: m.IntegrateRequest) -> m.IntegrateResponse:
        return handlers.integrate(req)

    @app.post("/improper", response_model=m.ImproperResponse, response_model_exclude_none=True)
    def improper(req: m.ImproperRequest) -> m.ImproperResponse:
        return handlers.improper(req)

    @app.post("/transform", response_model=m.TransformResponse)
    def transform(req: m.TransformRequest) -> m.TransformResponse:
        return handlers.transform(req)

    @app.post("/regularity", response_model=m.RegularityResponse)
    def regularity(req: m.RegularityRequest) -> m.RegularityResponse:
        return handlers.regularity(req)

    @app.post("/dual/apply", response_model=m.DualApplyResponse)
    def dual_apply(req: m.DualApplyRequest) -> m.DualApplyResponse:
        return handlers.dual_apply(req)

    @app.post("/dual/norm", response_model=m.DualNormResponse)
    def dual_norm(req: m.DualNormRequest) -> m.DualNormResponse:
        return handlers.dual_norm(req)

    @app.post("/dual/witness", response_model=m.DualWitnessResponse)
    def dual_witness(req: m.DualWitnessRequest) -> m.DualWitnessResponse:
        return handlers.dual_witness(req)

    @app.post("/extract-kernel", response_model=m.ExtractKernelResponse, response_model_exclude_none=True)
    def extract_kernel(req: m.ExtractKernelRequest) -> m.ExtractKernelResponse:
        return handlers.extract_kernel(req)

    @app.post("/scale/info", response_model=m.ScaleInfoResponse, response_model_exclude_none=True)
    def scale_info(req: m.ScaleInfoRequest) -> m.ScaleInfoResponse:
        return handlers.scale_info(req)

    @app.post("/scale/probe", response_model=m.ScaleProbeResponse)
    def scale_probe(req: m.ScaleProbeRequest) -> m.ScaleProbeResponse:
        return handlers.scale_probe(req)

    return app
