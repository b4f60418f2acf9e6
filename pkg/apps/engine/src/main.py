"""FastAPI application: stateless asymptotics engine."""

import asyncio
import math

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .asymptotics.coeffgen import coefficients, format_qpolynomial, qpolynomial_to_json
from .asymptotics.errors import StruveAsymptoticsError
from .asymptotics.evaluate import error_report, error_report_at
from .asymptotics.landscape import Parameters, TraceOptions, trace_steepest
from .asymptotics.transitions import critical_beta, intercept_Q, triple_point
from .config import default_config
from .models.schemas import (
    ClassifyResponse,
    CoefficientOut,
    CoefficientsResponse,
    ComplexValue,
    CriticalBetaRequest,
    CriticalBetaResponse,
    ErrorResponse,
    EvalAtRequest,
    EvalAtResponse,
    EvalRequest,
    EvalResponse,
    InterceptResponse,
    PointRequest,
    TraceResponse,
    TriplePointResponse,
)

app = FastAPI(
    title="Struve Asymptotics Engine",
    version="0.1.0",
    responses={422: {"model": ErrorResponse, "description": "engine error or invalid request"}},
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

_opts = TraceOptions.from_config(default_config())


@app.exception_handler(StruveAsymptoticsError)
async def _engine_error(request: Request, exc: StruveAsymptoticsError):
    body = ErrorResponse(error=type(exc).__name__, detail=str(exc))
    return JSONResponse(status_code=422, content=body.model_dump())


@app.get("/health")
async def health():
    return {"status": "ok"}


@app.get("/coeffs", response_model=CoefficientsResponse)
async def coeffs(kmax: int = Query(10, ge=0, le=200)):
    cs = await asyncio.to_thread(coefficients, kmax)
    return CoefficientsResponse(
        k_max=kmax,
        coefficients=[
            CoefficientOut(k=k, text=format_qpolynomial(c, k), coeffs=qpolynomial_to_json(c))
            for k, c in enumerate(cs)
        ],
    )


@app.post("/classify", response_model=ClassifyResponse)
async def classify(req: PointRequest):
    params = Parameters(req.q.value(), req.theta_over_pi * math.pi)
    trace = await asyncio.to_thread(trace_steepest, params, _opts)
    return ClassifyResponse(
        q=req.q, theta_over_pi=req.theta_over_pi, label=trace.terminal.value, endpoint=trace.terminal.symbol
    )


@app.post("/trace", response_model=TraceResponse)
async def trace(req: PointRequest):
    params = Parameters(req.q.value(), req.theta_over_pi * math.pi)
    t = await asyncio.to_thread(trace_steepest, params, _opts, True)
    return TraceResponse(
        label=t.terminal.value,
        sheet_winding=t.sheet_winding,
        rejected_steps=t.rejected_steps,
        points=[(p.u.real, p.u.imag) for p in t.points],
        re_tau=[v.real for v in t.tau_values],
    )


@app.post("/critical-beta", response_model=CriticalBetaResponse)
async def critical_beta_endpoint(req: CriticalBetaRequest):
    beta = await asyncio.to_thread(critical_beta, req.alpha, req.theta_over_pi * math.pi, req.bracket, _opts)
    return CriticalBetaResponse(alpha=req.alpha, theta_over_pi=req.theta_over_pi, beta=beta)


@app.get("/triple-point", response_model=TriplePointResponse)
async def triple_point_endpoint(theta_over_pi: float = Query(..., gt=-0.5, lt=0.5)):
    tp = await asyncio.to_thread(triple_point, theta_over_pi * math.pi, _opts)
    return TriplePointResponse(theta_over_pi=theta_over_pi, q_P=ComplexValue.of(tp.q_P), verified=tp.verified)


@app.get("/intercept", response_model=InterceptResponse)
async def intercept_endpoint(theta_over_pi: float = Query(..., gt=-0.5, lt=0.5)):
    q = await asyncio.to_thread(intercept_Q, theta_over_pi * math.pi, (0.005, 1.0), _opts)
    return InterceptResponse(theta_over_pi=theta_over_pi, q_Q=q.q_Q)


def _run_eval(req: EvalRequest) -> EvalResponse:
    """Synchronous evaluation; runs in the thread pool."""
    r = error_report(req.q.value(), req.theta_over_pi * math.pi, req.modulus_z, req.k_max, req.digits, _opts)
    return EvalResponse(
        q=ComplexValue.of(r.q),
        theta_over_pi=req.theta_over_pi,
        endpoint=r.endpoint_symbol,
        variant=r.variant.value,
        k_star=r.k_star,
        asymptotic=ComplexValue.of(r.asymptotic),
        oracle=ComplexValue.of(r.oracle),
        oracle_method=r.oracle_method.value,
        rel_err_H=r.relative_error_H,
        rel_err_combo=r.relative_error_combination,
    )


@app.post("/eval", response_model=EvalResponse)
async def evaluate(req: EvalRequest):
    return await asyncio.to_thread(_run_eval, req)


def _run_eval_at(req: EvalAtRequest) -> EvalAtResponse:
    r = error_report_at(req.nu.value(), req.z.value(), req.k_max, req.digits, _opts)
    return EvalAtResponse(
        q=ComplexValue.of(r.q),
        theta_over_pi=r.theta / math.pi,
        continuation=r.continuation,
        endpoint=r.endpoint_symbol,
        variant=r.variant.value,
        k_star=r.k_star,
        value=ComplexValue.of(r.continued_asymptotic),
        rel_err_H=r.relative_error_H,
    )


@app.post("/eval-at", response_model=EvalAtResponse)
async def evaluate_at(req: EvalAtRequest):
    return await asyncio.to_thread(_run_eval_at, req)
