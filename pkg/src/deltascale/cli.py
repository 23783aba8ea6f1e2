"""Command-line front end.

Each subcommand builds a service request model, calls the shared handler
layer in-process, and prints either a human-readable summary or the JSON
response body (--json).  Exit codes: 0 success, 2 config/parse errors,
3 numeric non-convergence under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from pydantic import BaseModel, ValidationError

from .expr import ExprError, ParseError
from .service import handlers
from .service import models as m
from .timescale import DescriptorError, NotInScaleError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _merge_config(args: argparse.Namespace, keys: list[str]) -> dict[str, Any]:
    """Config-file values overlaid by explicitly passed flags."""
    merged: dict[str, Any] = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise DescriptorError("config file must hold a JSON object")
        merged.update({k: v for k, v in loaded.items() if k in keys})
    for key in keys:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    return merged


def _emit(resp: BaseModel, args: argparse.Namespace, human: Callable[[BaseModel], str]) -> None:
    if args.json:
        print(resp.model_dump_json(indent=2, exclude_none=True))
    else:
        print(human(resp))


def _integral_text(r) -> str:
    lines = [
        f"value             = {r.value!r}",
        f"abs error est.    = {r.abs_error_estimate!r}",
        f"converged         = {r.converged}",
        f"evaluations       = {r.evaluations}",
        f"truncation point  = {r.truncation_point!r}",
    ]
    segs = getattr(r, "segments", None)
    if segs:
        lines.append("segments:")
        for s in segs:
            lines.append(f"  {s.kind:5s} [{s.lo!r}, {s.hi!r}] value={s.value!r} err={s.error!r}")
    chks = getattr(r, "checkpoints", None)
    if chks:
        lines.append("truncation steps:")
        for c in chks:
            lines.append(f"  A={c.target!r}  F(A)={c.value!r}")
    return "\n".join(lines)


def cmd_integrate(args: argparse.Namespace) -> int:
    req = m.IntegrateRequest(**_merge_config(args, ["scale", "f", "a", "b", "tol", "trace"]))
    resp = handlers.integrate(req)
    _emit(resp, args, _integral_text)
    if args.strict and not resp.converged:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_improper(args: argparse.Namespace) -> int:
    keys = ["scale", "f", "a", "tol", "first_offset", "growth", "stall_steps", "max_evaluations", "max_target", "trace"]
    req = m.ImproperRequest(**_merge_config(args, keys))
    resp = handlers.improper(req)
    _emit(resp, args, _integral_text)
    if args.strict and not resp.converged:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    req = m.TransformRequest(**_merge_config(args, ["kernel", "xscale", "tscale", "f", "xs", "x_count", "tol"]))
    resp = handlers.transform(req)

    def text(r: m.TransformResponse) -> str:
        lines = [f"{'x':>14s} {'(Lf)(x)':>22s}  converged"]
        for row in r.rows:
            lines.append(f"{row.x!r:>14s} {row.value!r:>22s}  {row.converged}")
        return "\n".join(lines)

    _emit(resp, args, text)
    if args.strict and any(not row.converged for row in resp.rows):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_regularity(args: argparse.Namespace) -> int:
    keys = ["kernel", "xscale", "tscale", "tol", "x_horizon", "x0_count", "y_count", "decay_ratio"]
    req = m.RegularityRequest(**_merge_config(args, keys))
    resp = handlers.regularity(req)

    def text(r: m.RegularityResponse) -> str:
        lines = [f"verdict    = {r.verdict}", f"M estimate = {r.m_estimate!r}"]
        for name in ("i", "ii", "iii", "iv"):
            cond = r.conditions[name]
            status = "pass" if cond.passed else "FAIL"
            note = f"  ({cond.note})" if cond.note else ""
            lines.append(f"condition {name:<3s}: {status}{note}")
            if args.trace:
                for w in cond.witnesses:
                    lines.append(f"    at {w.point} -> {w.value!r}")
        return "\n".join(lines)

    _emit(resp, args, text)
    return EXIT_OK


def _rep_model(args: argparse.Namespace) -> m.DualRepModel:
    obj = json.loads(args.rep) if isinstance(args.rep, str) else args.rep
    return m.DualRepModel(**obj)


def cmd_dual(args: argparse.Namespace) -> int:
    if args.action == "norm":
        resp = handlers.dual_norm(m.DualNormRequest(rep=_rep_model(args)))
        _emit(resp, args, lambda r: f"norm = {r.norm!r}\nell1 = {r.ell1!r}")
        return EXIT_OK
    if args.action == "apply":
        merged = _merge_config(args, ["scale", "f", "start", "tol", "horizon"])
        resp = handlers.dual_apply(m.DualApplyRequest(rep=_rep_model(args), **merged))
        _emit(resp, args, lambda r: f"F(f)  = {r.value!r}\nlim f = {r.limit!r}")
        return EXIT_OK
    merged = _merge_config(args, ["scale", "r", "start", "preview", "tol", "horizon"])
    resp = handlers.dual_witness(m.DualWitnessRequest(rep=_rep_model(args), **merged))
    _emit(
        resp,
        args,
        lambda r: f"F(witness) = {r.functional_value!r}\nnorm       = {r.norm!r}\nfirst values = {r.witness_values!r}",
    )
    return EXIT_OK


def cmd_extract_kernel(args: argparse.Namespace) -> int:
    keys = ["operator", "rowmap", "xscale", "tscale", "start", "width", "xs", "x_count", "verify", "tol"]
    req = m.ExtractKernelRequest(**_merge_config(args, keys))
    resp = handlers.extract_kernel(req)

    def text(r: m.ExtractKernelResponse) -> str:
        lines = ["K(x, t_k) over the materialized window:"]
        header = "x \\ t " + " ".join(f"{t!r:>10s}" for t in r.ts)
        lines.append(header)
        for x, row in zip(r.xs, r.matrix):
            lines.append(f"{x!r:>6s} " + " ".join(f"{v!r:>10s}" for v in row))
        for w in r.warnings:
            lines.append(f"warning: {w}")
        if r.verification is not None:
            lines.append(f"reconstruction max |diff| = {r.verification.max_abs_diff!r} (passed={r.verification.passed})")
            lines.append("row integrals of K against f == 1:")
            for w in r.verification.unit_rows:
                lines.append(f"  x={w.point[0]!r} -> {w.value!r}")
        return "\n".join(lines)

    _emit(resp, args, text)
    return EXIT_OK


def cmd_scale(args: argparse.Namespace) -> int:
    if args.action == "info":
        req = m.ScaleInfoRequest(**_merge_config(args, ["scale", "a", "b", "count"]))
        resp = handlers.scale_info(req)

        def text(r: m.ScaleInfoResponse) -> str:
            lines = [
                f"minimum      = {r.minimum!r}",
                f"descriptor   = {json.dumps(r.descriptor)}",
                f"first points = {r.sample_points!r}",
            ]
            if r.segments is not None:
                lines.append("segments:")
                for s in r.segments:
                    lines.append(f"  {s.kind:5s} [{s.lo!r}, {s.hi!r}]")
            return "\n".join(lines)

        _emit(resp, args, text)
        return EXIT_OK
    req = m.ScaleProbeRequest(**_merge_config(args, ["scale", "f", "start", "tol", "window", "horizon", "sup_horizon"]))
    resp = handlers.scale_probe(req)

    def text(r: m.ScaleProbeResponse) -> str:
        return "\n".join(
            [
                f"in C  (limit exists): {r.in_c}",
                f"in C0 (limit is 0)  : {r.in_c0}",
                f"limit status = {r.limit_status}, value = {r.limit_value!r}",
                f"oscillation  = {r.oscillation!r} at horizon {r.horizon!r}",
                f"sup norm (sampled lower bound) = {r.sup_norm!r}",
            ]
        )

    _emit(resp, args, text)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--json", action="store_true", help="print the JSON response body")
    sp.add_argument("--trace", action="store_true", default=None, help="include recomputation witnesses")
    sp.add_argument("--strict", action="store_true", help="exit 3 on numeric non-convergence")
    sp.add_argument("--config", help="JSON file with request fields (flags override)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deltascale", description="Riemann delta-calculus on time scales")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="bounded delta-integral of f over [a, b]")
    p.add_argument("--scale", help='scale descriptor JSON or "integers"/"reals"')
    p.add_argument("--f", help="expression in t")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--tol", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("improper", help="improper integral of f from a to infinity")
    p.add_argument("--scale")
    p.add_argument("--f")
    p.add_argument("--a", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--first-offset", dest="first_offset", type=float)
    p.add_argument("--growth", type=float)
    p.add_argument("--stall-steps", dest="stall_steps", type=int)
    p.add_argument("--max-evaluations", dest="max_evaluations", type=int)
    p.add_argument("--max-target", dest="max_target", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_improper)

    p = sub.add_parser("transform", help="evaluate (Lf)(x) on an x-grid")
    p.add_argument("--kernel", help="expression in x and t")
    p.add_argument("--xscale")
    p.add_argument("--tscale")
    p.add_argument("--f")
    p.add_argument("--xs", type=lambda s: [float(v) for v in s.split(",")], help="comma-separated x values")
    p.add_argument("--x-count", dest="x_count", type=int)
    p.add_argument("--tol", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("regularity", help="audit the kernel regularity conditions")
    p.add_argument("--kernel")
    p.add_argument("--xscale")
    p.add_argument("--tscale")
    p.add_argument("--tol", type=float)
    p.add_argument("--x-horizon", dest="x_horizon", type=float)
    p.add_argument("--x0-count", dest="x0_count", type=int)
    p.add_argument("--y-count", dest="y_count", type=int)
    p.add_argument("--decay-ratio", dest="decay_ratio", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_regularity)

    p = sub.add_parser("dual", help="apply/norm/witness for a dual functional")
    p.add_argument("action", choices=["apply", "norm", "witness"])
    p.add_argument("--rep", required=True, help='functional as JSON {"b": ..., "coeffs": [...]}')
    p.add_argument("--scale")
    p.add_argument("--f")
    p.add_argument("--start", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--preview", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--horizon", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_dual)

    p = sub.add_parser("extract-kernel", help="recover K from a named operator")
    p.add_argument("--operator", choices=["identity", "shift", "cesaro", "custom"])
    p.add_argument("--rowmap", help="K(x, t) expression for the custom operator")
    p.add_argument("--xscale")
    p.add_argument("--tscale")
    p.add_argument("--start", type=float)
    p.add_argument("--width", type=int)
    p.add_argument("--xs", type=lambda s: [float(v) for v in s.split(",")])
    p.add_argument("--x-count", dest="x_count", type=int)
    p.add_argument("--no-verify", dest="verify", action="store_false", default=None)
    p.add_argument("--tol", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_extract_kernel)

    p = sub.add_parser("scale", help="inspect a scale or probe a function's membership")
    p.add_argument("action", choices=["info", "probe"])
    p.add_argument("--scale")
    p.add_argument("--f")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--start", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--horizon", type=float)
    p.add_argument("--sup-horizon", dest="sup_horizon", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_scale)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExprError, DescriptorError, NotInScaleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"error: invalid request: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
