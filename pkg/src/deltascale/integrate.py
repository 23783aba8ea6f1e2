"""Riemann delta-sums, bounded delta-integrals, and improper integrals.

Jumps contribute exact terms gap * f(t); dense runs are handled by a
composite midpoint rule under dyadic refinement, stopping when successive
levels agree within the run's share of the tolerance.  All contributions
are accumulated with math.fsum, so purely discrete integrals are exact
(independent of summation order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from . import expr
from .timescale import TimeScale, graininess, iter_parts, next_point_at_or_after

_TRACE_CAP = 4096


@dataclass(frozen=True)
class ScaleFunction:
    """A real function on the points of a time scale from `start` onward."""

    evaluator: Callable[[float], float]
    scale: TimeScale
    start: float

    def __call__(self, t: float) -> float:
        return self.evaluator(t)

    @staticmethod
    def from_expression(src: "str | expr.Node", scale: TimeScale, start: float) -> "ScaleFunction":
        node = expr.parse(src) if isinstance(src, str) else src
        stray = expr.free_vars(node) - {"t"}
        if stray:
            raise expr.EvalError(f"a scale function may only use 't'; found {sorted(stray)}")
        fn = expr.compile_fn(node, ("t",))
        return ScaleFunction(fn, scale, float(start))


@dataclass(frozen=True)
class SegmentTrace:
    kind: str  # "dense" | "jump"
    lo: float
    hi: float
    value: float
    error: float
    evaluations: int
    levels: int


@dataclass(frozen=True)
class Checkpoint:
    """One truncation step of an improper integral: (A, F(A))."""

    target: float
    value: float


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int
    truncation_point: float
    trace: tuple = None


Integrand = Union[ScaleFunction, Callable[[float], float]]


def _callable_of(f: Integrand) -> Callable[[float], float]:
    return f.evaluator if isinstance(f, ScaleFunction) else f


# ---------------------------------------------------------------------------
# Riemann sums


def riemann_sum(f: Integrand, ts: TimeScale, p, selector: "str | Callable[[float, float], float]" = "left") -> float:
    """Tagged sum over a partition: sum of f(xi_i) * (t_i - t_{i-1}).

    The tag xi_i must lie in [t_{i-1}, t_i) and on the scale; the default
    left-endpoint rule always qualifies.
    """
    fe = _callable_of(f)
    pts = p.points
    terms = []
    for u, v in zip(pts, pts[1:]):
        if selector == "left":
            xi = u
        else:
            xi = float(selector(u, v))
            if not (u <= xi < v):
                raise ValueError(f"tag {xi} outside [{u}, {v})")
            ts.locate(xi)
        terms.append(fe(xi) * (v - u))
    return math.fsum(terms)


def single_step_integral(f: Integrand, ts: TimeScale, t: float) -> float:
    """Integral from t to sigma(t): exactly graininess(t) * f(t)."""
    t = ts.locate(t)
    mu = graininess(ts, t)
    if mu == 0.0:
        return 0.0
    return mu * _callable_of(f)(t)


# ---------------------------------------------------------------------------
# Bounded integrals


def _dense_midpoint(
    fe: Callable[[float], float],
    lo: float,
    hi: float,
    share: float,
    max_levels: int,
    eval_budget: int,
) -> tuple[float, float, int, bool, int]:
    """Composite midpoint with dyadic refinement.

    Error estimate is the gap between the last two refinement levels.
    Returns (value, error, evaluations, converged, levels).
    """
    width = hi - lo
    prev = width * fe(lo + 0.5 * width)
    evals = 1
    diff = math.inf
    level = 0
    while level < max_levels:
        level += 1
        n = 1 << level
        if evals + n > eval_budget:
            return prev, diff, evals, False, level - 1
        h = width / n
        s = h * math.fsum(fe(lo + (i + 0.5) * h) for i in range(n))
        evals += n
        diff = abs(s - prev)
        prev = s
        if level >= 2 and diff <= share:
            return prev, diff, evals, True, level
    return prev, diff, evals, False, level


def _accumulate(
    fe: Callable[[float], float],
    ts: TimeScale,
    a: float,
    b: float,
    tol: float,
    max_levels: int,
    eval_budget: int,
    terms: list[float],
    trace: "list[SegmentTrace] | None",
) -> tuple[float, int, bool]:
    """Append the contributions of [a, b] to `terms`.

    Returns (quadrature_error, evaluations, all_dense_converged).  Exact
    zero terms are skipped; they cannot change an fsum.
    """
    total = b - a
    errs: list[float] = []
    evals = 0
    ok = True
    append = terms.append
    for part in iter_parts(ts, a, b):
        if part[0] == "jump":
            _, at, gap = part
            v = gap * fe(at)
            evals += 1
            if v != 0.0:
                append(v)
            if trace is not None and len(trace) < _TRACE_CAP:
                trace.append(SegmentTrace("jump", at, at + gap, v, 0.0, 1, 0))
        else:
            _, lo, hi = part
            share = tol * (hi - lo) / total
            v, err, ev, conv, levels = _dense_midpoint(fe, lo, hi, share, max_levels, eval_budget - evals)
            evals += ev
            ok = ok and conv
            errs.append(err if math.isfinite(err) else 0.0)
            if v != 0.0:
                append(v)
            if trace is not None and len(trace) < _TRACE_CAP:
                trace.append(SegmentTrace("dense", lo, hi, v, err, ev, levels))
    return math.fsum(errs), evals, ok


def delta_integral(
    f: Integrand,
    ts: TimeScale,
    a: float,
    b: float,
    tol: float = 1e-8,
    max_levels: int = 24,
    keep_trace: bool = False,
) -> IntegralResult:
    """Riemann delta-integral over [a, b] of the scale (a <= b required).

    Jump contributions are exact; each dense run is refined until two
    consecutive midpoint levels agree within the run's share of `tol`.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = ts.locate(a)
    b = ts.locate(b)
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return IntegralResult(0.0, 0.0, True, 0, b, () if keep_trace else None)
    terms: list[float] = []
    trace: list[SegmentTrace] | None = [] if keep_trace else None
    err, evals, ok = _accumulate(_callable_of(f), ts, a, b, tol, max_levels, 1 << 62, terms, trace)
    return IntegralResult(
        value=math.fsum(terms),
        abs_error_estimate=err,
        converged=ok,
        evaluations=evals,
        truncation_point=b,
        trace=tuple(trace) if trace is not None else None,
    )


# ---------------------------------------------------------------------------
# Improper integrals of the first kind


@dataclass(frozen=True)
class TruncationPolicy:
    """Increasing truncation targets a + first_offset * growth^k, snapped
    forward to scale points, with stall-based convergence detection."""

    first_offset: float = 1.0
    growth: float = 2.0
    stall_steps: int = 3
    max_evaluations: int = 5_000_000
    max_target: float = 1e15

    def __post_init__(self) -> None:
        if not self.first_offset > 0:
            raise ValueError("first_offset must be positive")
        if not self.growth > 1:
            raise ValueError("growth must exceed 1")
        if self.stall_steps < 1:
            raise ValueError("stall_steps must be at least 1")


def improper_integral(
    f: Integrand,
    ts: TimeScale,
    a: float,
    tol: float = 1e-6,
    policy: TruncationPolicy | None = None,
    max_levels: int = 24,
    keep_trace: bool = False,
) -> IntegralResult:
    """Limit of F(A) = integral from a to A, detected by stalling.

    Convergence is declared after `stall_steps` consecutive truncation
    steps move F by less than tol/2 (with converged quadrature); half the
    tolerance is reserved for the dense-run quadrature budget so a
    converged result's error estimate stays within tol.  Divergence or a
    blown budget is reported through converged=False, never raised.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    pol = policy or TruncationPolicy()
    fe = _callable_of(f)
    a = ts.locate(a)
    terms: list[float] = []
    checkpoints: "list[Checkpoint] | None" = [] if keep_trace else None
    quad_errs: list[float] = []
    a_prev = a
    f_prev = 0.0
    d_f = math.inf
    stall = 0
    evals = 0
    increments = 0
    all_ok = True
    converged = False
    k = 0
    while True:
        target = a + pol.first_offset * pol.growth**k
        k += 1
        if target > pol.max_target:
            break
        try:
            big_a = next_point_at_or_after(ts, target)
        except OverflowError:
            break
        if big_a <= a_prev:
            continue
        tol_inc = tol * 2.0 ** -(min(increments, 20) + 2)
        increments += 1
        err, ev, ok = _accumulate(
            fe, ts, a_prev, big_a, tol_inc, max_levels, pol.max_evaluations - evals, terms, None
        )
        evals += ev
        quad_errs.append(err)
        all_ok = all_ok and ok
        big_f = math.fsum(terms)
        d_f = abs(big_f - f_prev)
        f_prev = big_f
        a_prev = big_a
        if checkpoints is not None:
            checkpoints.append(Checkpoint(big_a, big_f))
        if ok and d_f < tol / 2.0:
            stall += 1
            if stall >= pol.stall_steps and all_ok:
                converged = True
                break
        else:
            stall = 0
        if evals >= pol.max_evaluations:
            break
    err_total = math.fsum(quad_errs) + (d_f if math.isfinite(d_f) else 0.0)
    return IntegralResult(
        value=f_prev,
        abs_error_estimate=err_total,
        converged=converged,
        evaluations=evals,
        truncation_point=a_prev,
        trace=tuple(checkpoints) if checkpoints is not None else None,
    )
