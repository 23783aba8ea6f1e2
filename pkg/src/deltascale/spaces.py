"""Numerical membership diagnostics for bounded-limit function spaces.

Everything here is finite-sample evidence, never proof: a limit at
infinity is diagnosed from windows of nearby samples taken at doubling
anchors, and the sup norm is a sampled lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .integrate import ScaleFunction
from .timescale import iter_parts, next_point_at_or_after, sigma

CONVERGED = "converged"
DIVERGED = "diverged"
UNKNOWN = "unknown"


class Verdict(str, Enum):
    EVIDENCE_FOR = "evidence-for"
    EVIDENCE_AGAINST = "evidence-against"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LimitDiagnosis:
    status: str  # CONVERGED | DIVERGED | UNKNOWN
    value: "float | None"
    horizon: float
    oscillation: float

    @property
    def is_converged(self) -> bool:
        return self.status == CONVERGED


def _anchor_targets(start: float, horizon: float) -> Iterator[float]:
    """Doubling offsets from the start; the first target at or past the
    horizon is included (snap-forward), then iteration stops."""
    off = 1.0
    while True:
        yield start + off
        if start + off >= horizon:
            return
        off *= 2.0


def _window_points(f: ScaleFunction, anchor: float, count: int, spread_frac: float) -> list[float]:
    """`count` nearby scale points from the anchor onward.

    Scattered points advance by their natural jump; on dense runs a small
    anchor-relative step keeps the window local.
    """
    ts = f.scale
    pts = [anchor]
    t = anchor
    step = max(abs(anchor), 1.0) * spread_frac
    for _ in range(count - 1):
        s = sigma(ts, t)
        t = s if s > t else next_point_at_or_after(ts, t + step)
        pts.append(t)
    return pts


def limit_at_infinity(
    f: ScaleFunction,
    tol: float,
    window: int = 8,
    horizon: float = 1e6,
    escape_bound: float = 1e12,
    spread_frac: float = 1e-3,
) -> LimitDiagnosis:
    """Diagnose lim f(t) as t grows through the scale.

    Samples a window of nearby points at each doubling anchor up to the
    horizon (final anchor snap-forward).  Converged(v) when the last
    window lies within tol of its mean v; Diverged when any sample
    escapes `escape_bound`; Unknown otherwise.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if window < 2:
        raise ValueError("window must be at least 2")
    ts = f.scale
    start = ts.locate(f.start)
    mean = 0.0
    spread = math.inf
    deviation = math.inf
    last_anchor = start
    for target in _anchor_targets(start, horizon):
        anchor = next_point_at_or_after(ts, target)
        points = _window_points(f, anchor, window, spread_frac)
        samples = [f.evaluator(p) for p in points]
        last_anchor = points[-1]
        if any(abs(v) > escape_bound for v in samples):
            return LimitDiagnosis(DIVERGED, None, last_anchor, math.inf)
        mean = math.fsum(samples) / len(samples)
        spread = max(samples) - min(samples)
        deviation = max(abs(v - mean) for v in samples)
    if deviation <= tol:
        return LimitDiagnosis(CONVERGED, mean, last_anchor, spread)
    return LimitDiagnosis(UNKNOWN, None, last_anchor, spread)


@dataclass(frozen=True)
class SamplerSpec:
    """Sampling density for sup-norm scans: every scattered point is
    visited; each dense run gets `dense_samples` midpoint-offset probes."""

    dense_samples: int = 64
    max_points: int = 500_000


def sup_norm(f: ScaleFunction, horizon: float, sampler: SamplerSpec | None = None) -> float:
    """Sampled lower bound for sup |f| on [start, horizon]."""
    spec = sampler or SamplerSpec()
    ts = f.scale
    fe = f.evaluator
    a = ts.locate(f.start)
    b = next_point_at_or_after(ts, horizon)
    best = abs(fe(a))
    seen = 1
    for part in iter_parts(ts, a, b):
        if seen >= spec.max_points:
            break
        if part[0] == "jump":
            v = abs(fe(part[1]))
            seen += 1
        else:
            _, lo, hi = part
            h = (hi - lo) / spec.dense_samples
            v = max(abs(fe(lo + (i + 0.5) * h)) for i in range(spec.dense_samples))
            v = max(v, abs(fe(hi)))
            seen += spec.dense_samples + 1
        if v > best:
            best = v
    return best


@dataclass(frozen=True)
class MembershipConfig:
    tol: float = 1e-6
    window: int = 8
    horizon: float = 1e6
    escape_bound: float = 1e12
    sup_horizon: "float | None" = None  # defaults to horizon / 16


@dataclass(frozen=True)
class MembershipReport:
    in_c: Verdict
    in_c0: Verdict
    limit: LimitDiagnosis
    sup_norm: float


def membership_report(f: ScaleFunction, cfg: MembershipConfig | None = None) -> MembershipReport:
    """Evidence for membership in the bounded-limit / vanishing-limit spaces.

    On a discrete scale starting at 0 this is exactly a convergence
    diagnosis of the sequence of values.
    """
    cfg = cfg or MembershipConfig()
    diag = limit_at_infinity(f, cfg.tol, cfg.window, cfg.horizon, cfg.escape_bound)
    sup_h = cfg.sup_horizon if cfg.sup_horizon is not None else f.start + max(1.0, (cfg.horizon - f.start) / 16.0)
    norm = sup_norm(f, sup_h)
    if diag.status == CONVERGED:
        in_c = Verdict.EVIDENCE_FOR
        in_c0 = Verdict.EVIDENCE_FOR if abs(diag.value) <= cfg.tol else Verdict.EVIDENCE_AGAINST
    elif diag.status == DIVERGED:
        in_c = Verdict.EVIDENCE_AGAINST
        in_c0 = Verdict.EVIDENCE_AGAINST
    else:
        in_c = Verdict.INCONCLUSIVE
        in_c0 = Verdict.INCONCLUSIVE
    return MembershipReport(in_c=in_c, in_c0=in_c0, limit=diag, sup_norm=norm)
