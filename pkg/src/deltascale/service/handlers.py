"""Request handlers: pure request-model -> response-model functions.

Both the FastAPI routes and the CLI call these; library exceptions
(ParseError, DescriptorError, NotInScaleError, ValueError) propagate to
the caller, which maps them to HTTP 422 or exit code 2.
"""

from __future__ import annotations

import math

from .. import dual as dual_mod
from .. import kernels as kernels_mod
from .. import spaces as spaces_mod
from ..integrate import IntegralResult, ScaleFunction, TruncationPolicy, delta_integral, improper_integral
from ..kernels import Kernel, ProbeConfig
from ..timescale import TimeScale, decompose, parse_descriptor, to_descriptor
from . import models as m


def _scale(spec) -> TimeScale:
    return parse_descriptor(spec)


def _segments(result: IntegralResult) -> "list[m.SegmentModel] | None":
    if result.trace is None:
        return None
    return [
        m.SegmentModel(
            kind=s.kind, lo=s.lo, hi=s.hi, value=s.value, error=s.error, evaluations=s.evaluations, levels=s.levels
        )
        for s in result.trace
    ]


def integrate(req: m.IntegrateRequest) -> m.IntegrateResponse:
    ts = _scale(req.scale)
    f = ScaleFunction.from_expression(req.f, ts, req.a)
    r = delta_integral(f, ts, req.a, req.b, tol=req.tol, keep_trace=req.trace)
    return m.IntegrateResponse(
        value=r.value,
        abs_error_estimate=r.abs_error_estimate,
        converged=r.converged,
        evaluations=r.evaluations,
        truncation_point=r.truncation_point,
        segments=_segments(r),
    )


def improper(req: m.ImproperRequest) -> m.ImproperResponse:
    ts = _scale(req.scale)
    f = ScaleFunction.from_expression(req.f, ts, req.a)
    pol = TruncationPolicy(
        first_offset=req.first_offset,
        growth=req.growth,
        stall_steps=req.stall_steps,
        max_evaluations=req.max_evaluations,
        max_target=req.max_target,
    )
    r = improper_integral(f, ts, req.a, tol=req.tol, policy=pol, keep_trace=req.trace)
    checkpoints = None
    if r.trace is not None:
        checkpoints = [m.CheckpointModel(target=c.target, value=c.value) for c in r.trace]
    return m.ImproperResponse(
        value=r.value,
        abs_error_estimate=r.abs_error_estimate,
        converged=r.converged,
        evaluations=r.evaluations,
        truncation_point=r.truncation_point,
        checkpoints=checkpoints,
    )


def _kernel_from(req_kernel: str, xscale_spec, tscale_spec) -> Kernel:
    xs = _scale(xscale_spec)
    ts = _scale(tscale_spec)
    return Kernel.from_expression(req_kernel, xs, xs.minimum, ts, ts.minimum)


def transform(req: m.TransformRequest) -> m.TransformResponse:
    k = _kernel_from(req.kernel, req.xscale, req.tscale)
    f = ScaleFunction.from_expression(req.f, k.t_scale, k.t_start)
    xs = [k.x_scale.locate(x) for x in req.xs] if req.xs else kernels_mod._first_points(
        k.x_scale, k.x_start, req.x_count
    )
    rows = []
    for x in xs:
        r = kernels_mod.apply_transform(k, f, x, tol=req.tol)
        rows.append(
            m.TransformRow(
                x=x, value=r.value, converged=r.converged, evaluations=r.evaluations, truncation_point=r.truncation_point
            )
        )
    return m.TransformResponse(rows=rows)


def _condition_model(c) -> m.ConditionModel:
    return m.ConditionModel(
        passed=c.passed,
        tol=c.tol,
        note=c.note,
        witnesses=[m.WitnessModel(point=list(pt), value=v) for pt, v in c.witnesses],
    )


def regularity(req: m.RegularityRequest) -> m.RegularityResponse:
    k = _kernel_from(req.kernel, req.xscale, req.tscale)
    cfg = ProbeConfig(
        tol=req.tol,
        x_horizon=req.x_horizon,
        x0_count=req.x0_count,
        y_count=req.y_count,
        decay_ratio=req.decay_ratio,
    )
    rep = kernels_mod.regularity_report(k, cfg)
    return m.RegularityResponse(
        m_estimate=rep.m_estimate,
        conditions={
            "i": _condition_model(rep.cond_i),
            "ii": _condition_model(rep.cond_ii),
            "iii": _condition_model(rep.cond_iii),
            "iv": _condition_model(rep.cond_iv),
        },
        verdict=rep.verdict.value,
        failed=list(rep.failed),
    )


def _rep_of(model: m.DualRepModel) -> dual_mod.DualRep:
    return dual_mod.DualRep(float(model.b), tuple(model.coeffs), float(model.tail_bound))


def dual_apply(req: m.DualApplyRequest) -> m.DualApplyResponse:
    ts = _scale(req.scale)
    start = ts.minimum if req.start is None else req.start
    scale = dual_mod.IsolatedScale(ts, start)
    f = ScaleFunction.from_expression(req.f, ts, start)
    rep = _rep_of(req.rep)
    diag = spaces_mod.limit_at_infinity(f, req.tol, horizon=req.horizon)
    if not diag.is_converged:
        raise ValueError(f"limit of f not diagnosed as convergent (status {diag.status})")
    value = dual_mod.apply_functional(rep, f, scale, tol=req.tol, horizon=req.horizon)
    return m.DualApplyResponse(value=value, limit=diag.value)


def dual_norm(req: m.DualNormRequest) -> m.DualNormResponse:
    rep = _rep_of(req.rep)
    return m.DualNormResponse(
        norm=dual_mod.functional_norm(rep),
        tail_bound=rep.tail_bound,
        ell1=list(dual_mod.to_ell1(rep)),
    )


def dual_witness(req: m.DualWitnessRequest) -> m.DualWitnessResponse:
    ts = _scale(req.scale)
    start = ts.minimum if req.start is None else req.start
    scale = dual_mod.IsolatedScale(ts, start)
    rep = _rep_of(req.rep)
    w = dual_mod.norm_witness(rep, scale, req.r)
    value = dual_mod.apply_functional(rep, w, scale, tol=req.tol, horizon=req.horizon)
    preview = [w.evaluator(p) for p in scale.points(req.preview)]
    return m.DualWitnessResponse(
        functional_value=value,
        norm=dual_mod.functional_norm(rep),
        witness_values=preview,
    )


def extract_kernel(req: m.ExtractKernelRequest) -> m.ExtractKernelResponse:
    xs_scale = _scale(req.xscale)
    ts_scale = _scale(req.tscale)
    start = ts_scale.minimum if req.start is None else req.start
    iso = dual_mod.IsolatedScale(ts_scale, start)
    op = dual_mod.operator_registry(req.operator, xs_scale, iso, rowmap=req.rowmap)
    kern = dual_mod.extract_kernel(op, xs_scale, iso, width=req.width)
    xs = [xs_scale.locate(x) for x in req.xs] if req.xs else kernels_mod._first_points(
        xs_scale, kern.x_start, req.x_count
    )
    ts_points = iso.points(req.width)
    matrix = [[kern.evaluator(x, t) for t in ts_points] for x in xs]
    verification = None
    if req.verify:
        fns = [(f"e_{k}", dual_mod.basis_element(iso, k)) for k in range(1, min(req.width, 6) + 1)]
        report = dual_mod.verify_reconstruction(op, kern, fns, xs, tol=req.tol)
        verification = m.VerificationModel(
            max_abs_diff=report.max_abs_diff,
            passed=report.passed,
            unit_rows=[m.WitnessModel(point=[x], value=v) for x, v in report.unit_rows],
        )
    return m.ExtractKernelResponse(
        xs=list(xs),
        ts=list(ts_points),
        matrix=matrix,
        warnings=list(kern.extraction_warnings),
        verification=verification,
    )


def scale_info(req: m.ScaleInfoRequest) -> m.ScaleInfoResponse:
    ts = _scale(req.scale)
    sample = kernels_mod._first_points(ts, ts.minimum, req.count)
    segments = None
    if req.a is not None and req.b is not None:
        segs = decompose(ts, req.a, req.b)
        segments = []
        for s in segs:
            if hasattr(s, "gap"):
                segments.append(
                    m.SegmentModel(kind="jump", lo=s.at, hi=s.at + s.gap, value=s.gap, error=0.0, evaluations=0, levels=0)
                )
            else:
                segments.append(
                    m.SegmentModel(kind="dense", lo=s.lo, hi=s.hi, value=s.hi - s.lo, error=0.0, evaluations=0, levels=0)
                )
    return m.ScaleInfoResponse(
        minimum=ts.minimum,
        descriptor=to_descriptor(ts),
        sample_points=sample,
        segments=segments,
    )


def scale_probe(req: m.ScaleProbeRequest) -> m.ScaleProbeResponse:
    ts = _scale(req.scale)
    start = ts.minimum if req.start is None else req.start
    f = ScaleFunction.from_expression(req.f, ts, start)
    cfg = spaces_mod.MembershipConfig(
        tol=req.tol, window=req.window, horizon=req.horizon, sup_horizon=req.sup_horizon
    )
    rep = spaces_mod.membership_report(f, cfg)
    return m.ScaleProbeResponse(
        in_c=rep.in_c.value,
        in_c0=rep.in_c0.value,
        limit_status=rep.limit.status,
        limit_value=rep.limit.value,
        oscillation=rep.limit.oscillation if math.isfinite(rep.limit.oscillation) else 1e308,
        horizon=rep.limit.horizon,
        sup_norm=rep.sup_norm,
    )
