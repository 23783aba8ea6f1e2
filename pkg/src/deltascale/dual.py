"""Dual-space machinery for scales whose tail consists of isolated points.

On such scales every continuous functional on the bounded-limit space is
b * (limit at infinity) + sum of b_n * f(t_n) with absolutely summable
coefficients, its norm is |b| + sum |b_n|, and the correspondence with
summable sequences preserves norms exactly.  Bounded operators into
vanishing-limit functions are integral transforms; their kernel is
recovered row by row from the operator's action on the indicator basis.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from itertools import chain
from typing import Callable, Sequence

from .integrate import ScaleFunction, TruncationPolicy
from .kernels import Kernel, apply_transform, _first_points
from .spaces import limit_at_infinity
from .timescale import TimeScale, sigma

Operator = Callable[[Callable[[float], float]], Callable[[float], float]]


class IsolatedScale:
    """Index view t_1 < t_2 < ... of a scale that is isolated from `start`.

    Points are materialized lazily by walking the forward jump; hitting a
    right-dense point raises, since the enumeration premise fails there.
    """

    def __init__(self, scale: TimeScale, start: "float | None" = None):
        self._scale = scale
        first = scale.locate(scale.minimum if start is None else start)
        self._pts: list[float] = [first]

    @property
    def scale(self) -> TimeScale:
        return self._scale

    @property
    def start(self) -> float:
        return self._pts[0]

    def _grow(self) -> None:
        last = self._pts[-1]
        nxt = sigma(self._scale, last)
        if not nxt > last:
            raise ValueError(f"scale is right-dense at {last}; not an isolated scale")
        self._pts.append(nxt)

    def point(self, k: int) -> float:
        """1-based point lookup."""
        if k < 1:
            raise IndexError(f"point index must be >= 1, got {k}")
        while len(self._pts) < k:
            self._grow()
        return self._pts[k - 1]

    def points(self, count: int) -> list[float]:
        self.point(max(count, 1))
        return self._pts[:count]

    def points_up_to(self, x: float) -> list[float]:
        """All materializable points t_k <= x."""
        while self._pts[-1] <= x:
            self._grow()
        return self._pts[: bisect_right(self._pts, x)]

    def index_of(self, t: float) -> "int | None":
        """1-based index of a scale point; None when t is off the scale."""
        snap = self._scale.snap
        while self._pts[-1] < t - snap:
            self._grow()
        i = bisect_left(self._pts, t - snap)
        if i < len(self._pts) and abs(self._pts[i] - t) <= snap:
            return i + 1
        return None

    def gap(self, k: int) -> float:
        """t_{k+1} - t_k."""
        return self.point(k + 1) - self.point(k)


# ---------------------------------------------------------------------------
# Schauder basis and expansions


def unit_element(scale: IsolatedScale) -> ScaleFunction:
    """The constant-one function."""
    return ScaleFunction(lambda t: 1.0, scale.scale, scale.start)


def basis_element(scale: IsolatedScale, k: int) -> ScaleFunction:
    """Indicator of the k-th point: 1 at t_k, 0 elsewhere."""
    if k < 1:
        raise IndexError(f"basis index must be >= 1, got {k}")

    def e_k(t: float) -> float:
        return 1.0 if scale.index_of(t) == k else 0.0

    return ScaleFunction(e_k, scale.scale, scale.start)


def schauder_expand(
    f: ScaleFunction,
    scale: IsolatedScale,
    n_terms: int,
    tol: float = 1e-6,
    window: int = 8,
    horizon: float = 1e6,
) -> tuple[float, tuple[float, ...]]:
    """Limit l and the first coefficients f(t_n) - l of the basis expansion."""
    diag = limit_at_infinity(f, tol, window=window, horizon=horizon)
    if not diag.is_converged:
        raise ValueError(f"limit at infinity not diagnosed as convergent (status {diag.status})")
    l = diag.value
    return l, tuple(f.evaluator(scale.point(n)) - l for n in range(1, n_terms + 1))


# ---------------------------------------------------------------------------
# Dual functionals


@dataclass(frozen=True)
class DualRep:
    """Functional b * lim f + sum b_n f(t_n).

    coeffs materializes b_1..b_N; tail_bound certifies sum_{n>N} |b_n|
    for generator-backed representations (0 for finite support).
    """

    b: float
    coeffs: tuple[float, ...]
    tail_bound: float = 0.0

    @staticmethod
    def finite(b: float, coeffs: Sequence[float]) -> "DualRep":
        return DualRep(float(b), tuple(float(c) for c in coeffs), 0.0)

    @staticmethod
    def from_generator(b: float, coeff_fn: Callable[[int], float], terms: int, tail_bound: float) -> "DualRep":
        if tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")
        return DualRep(float(b), tuple(float(coeff_fn(n)) for n in range(1, terms + 1)), float(tail_bound))


def functional_norm(rep: DualRep) -> float:
    """|b| + sum |b_n| over materialized coefficients.

    Exact for finite support; otherwise the true norm exceeds this by at
    most rep.tail_bound.
    """
    return math.fsum(chain((abs(rep.b),), (abs(c) for c in rep.coeffs)))


def apply_functional(
    rep: DualRep,
    f: ScaleFunction,
    scale: IsolatedScale,
    tol: float = 1e-6,
    window: int = 8,
    horizon: float = 1e6,
) -> float:
    """Evaluate the functional; needs a convergent limit diagnosis for f."""
    diag = limit_at_infinity(f, tol, window=window, horizon=horizon)
    if not diag.is_converged:
        raise ValueError(f"limit at infinity not diagnosed as convergent (status {diag.status})")
    terms = chain(
        (rep.b * diag.value,),
        (c * f.evaluator(scale.point(n + 1)) for n, c in enumerate(rep.coeffs)),
    )
    return math.fsum(terms)


def norm_witness(rep: DualRep, scale: IsolatedScale, r: int) -> ScaleFunction:
    """Sign-matching witness: sgn b_n at t_n for n <= r, sgn b beyond.

    Has sup norm at most 1, and its functional value climbs to the norm
    as r covers the support.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    signs = [_sgn(c) for c in rep.coeffs[:r]]
    sgn_b = _sgn(rep.b)

    def f(t: float) -> float:
        n = scale.index_of(t)
        if n is None:
            raise ValueError(f"{t} is not a point of the isolated scale")
        if n <= r:
            return signs[n - 1] if n <= len(signs) else 0.0
        return sgn_b

    return ScaleFunction(f, scale.scale, scale.start)


def to_ell1(rep: DualRep) -> tuple[float, ...]:
    """The summable sequence (b, b_1, b_2, ...)."""
    return (rep.b,) + rep.coeffs


def from_ell1(seq: Sequence[float]) -> DualRep:
    if not seq:
        raise ValueError("need at least the leading coefficient b")
    return DualRep(float(seq[0]), tuple(float(v) for v in seq[1:]))


def ell1_norm(seq: Sequence[float]) -> float:
    return math.fsum(abs(v) for v in seq)


def _sgn(v: float) -> float:
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


# ---------------------------------------------------------------------------
# Kernel extraction from abstract operators


def _finitely_supported(scale: IsolatedScale, values: Sequence[float]) -> Callable[[float], float]:
    vals = tuple(values)

    def f(t: float) -> float:
        n = scale.index_of(t)
        if n is not None and n <= len(vals):
            return vals[n - 1]
        return 0.0

    return f


def _linearity_warnings(
    op: Operator,
    x_scale: TimeScale,
    x_start: float,
    t_scale: IsolatedScale,
    tol: float = 1e-9,
    trials: int = 8,
    seed: int = 7,
) -> list[str]:
    rng = random.Random(seed)
    xs = _first_points(x_scale, x_start, 4)
    warnings = []
    for trial in range(trials):
        width = rng.randint(3, 10)
        fv = [rng.uniform(-2, 2) for _ in range(width)]
        gv = [rng.uniform(-2, 2) for _ in range(width)]
        alpha = rng.uniform(-2, 2)
        f = _finitely_supported(t_scale, fv)
        g = _finitely_supported(t_scale, gv)
        combo = _finitely_supported(t_scale, [alpha * a + b for a, b in zip(fv, gv)])
        lf, lg, lc = op(f), op(g), op(combo)
        for x in xs:
            lhs = lc(x)
            rhs = alpha * lf(x) + lg(x)
            if abs(lhs - rhs) > tol * (1.0 + abs(lhs) + abs(rhs)):
                warnings.append(
                    f"linearity spot-check failed at x={x} (trial {trial}): |{lhs} - {rhs}| > {tol}"
                )
                break
    return warnings


def extract_kernel(
    op: Operator,
    x_scale: TimeScale,
    t_scale: IsolatedScale,
    width: int = 64,
    x_start: "float | None" = None,
    check_linearity: bool = True,
) -> Kernel:
    """Recover K(x, t_k) = (op e_k)(x) / (t_{k+1} - t_k).

    The first `width` basis rows are materialized eagerly; later indices
    extend lazily on demand.  Values are memoized per (x, k); recomputation
    under concurrent reads is idempotent.  A failed linearity spot-check
    is reported through Kernel.extraction_warnings, not raised.
    """
    x0 = x_scale.locate(x_scale.minimum if x_start is None else x_start)
    warnings = _linearity_warnings(op, x_scale, x0, t_scale) if check_linearity else []

    rows: dict[int, Callable[[float], float]] = {}

    def row(k: int) -> Callable[[float], float]:
        got = rows.get(k)
        if got is None:
            got = op(basis_element(t_scale, k).evaluator)
            rows[k] = got
        return got

    for k in range(1, width + 1):
        row(k)

    cache: dict[tuple[float, int], float] = {}

    def evaluator(x: float, t: float) -> float:
        k = t_scale.index_of(t)
        if k is None:
            raise ValueError(f"{t} is not a point of the isolated scale")
        key = (x, k)
        got = cache.get(key)
        if got is None:
            got = row(k)(x) / t_scale.gap(k)
            cache[key] = got
        return got

    return Kernel(
        evaluator=evaluator,
        x_scale=x_scale,
        x_start=x0,
        t_scale=t_scale.scale,
        t_start=t_scale.start,
        extraction_warnings=tuple(warnings),
    )


def extracted_row_mass(k: Kernel, t_scale: IsolatedScale, x: float, width: int) -> float:
    """sum over materialized indices of |K(x, t_k)| * (t_{k+1} - t_k);
    a lower bound for the operator norm."""
    return math.fsum(abs(k.evaluator(x, t_scale.point(i))) * t_scale.gap(i) for i in range(1, width + 1))


@dataclass(frozen=True)
class ReconstructionEntry:
    label: str
    x: float
    direct: float
    via_kernel: float

    @property
    def abs_diff(self) -> float:
        return abs(self.direct - self.via_kernel)


@dataclass(frozen=True)
class ReconstructionReport:
    entries: tuple[ReconstructionEntry, ...]
    unit_rows: tuple[tuple[float, float], ...]  # (x, integral of K(x, .))
    max_abs_diff: float
    passed: bool


def verify_reconstruction(
    op: Operator,
    k: Kernel,
    test_fns: Sequence[tuple[str, ScaleFunction]],
    xs: Sequence[float],
    tol: float = 1e-9,
    policy: TruncationPolicy | None = None,
) -> ReconstructionReport:
    """Compare (op f)(x) with the kernel transform per test function and x.

    Also integrates each row against the constant-one function; for an
    operator that preserves limits those row integrals should sit at 1.
    """
    entries = []
    for label, f in test_fns:
        lf = op(f.evaluator)
        for x in xs:
            direct = lf(x)
            via = apply_transform(k, f, x, tol=min(tol, 1e-9), policy=policy).value
            entries.append(ReconstructionEntry(label, x, direct, via))
    unit = ScaleFunction(lambda t: 1.0, k.t_scale, k.t_start)
    unit_rows = tuple(
        (x, apply_transform(k, unit, x, tol=min(tol, 1e-9), policy=policy).value) for x in xs
    )
    max_diff = max((e.abs_diff for e in entries), default=0.0)
    return ReconstructionReport(
        entries=tuple(entries),
        unit_rows=unit_rows,
        max_abs_diff=max_diff,
        passed=max_diff <= tol,
    )


# ---------------------------------------------------------------------------
# Built-in operators


def operator_registry(
    name: str,
    x_scale: TimeScale,
    t_scale: IsolatedScale,
    rowmap: "str | None" = None,
    tol: float = 1e-9,
) -> Operator:
    """Named operators for the CLI and tests: identity, shift, cesaro, or a
    custom expression-defined row map K(x, t)."""
    if name == "identity":
        return lambda fe: fe
    if name == "shift":

        def shift(fe: Callable[[float], float]) -> Callable[[float], float]:
            return lambda x: fe(sigma(t_scale.scale, x))

        return shift
    if name == "cesaro":

        def cesaro(fe: Callable[[float], float]) -> Callable[[float], float]:
            def lf(x: float) -> float:
                pts = t_scale.points_up_to(x)
                if not pts:
                    return 0.0
                c = 1.0 / len(pts)
                return math.fsum(c * fe(p) for p in pts)

            return lf

        return cesaro
    if name == "custom":
        if not rowmap:
            raise ValueError("custom operator needs a rowmap expression K(x, t)")
        kern = Kernel.from_expression(rowmap, x_scale, x_scale.minimum, t_scale.scale, t_scale.start)

        def custom(fe: Callable[[float], float]) -> Callable[[float], float]:
            return lambda x: apply_transform(kern, fe, x, tol=tol).value

        return custom
    raise ValueError(f"unknown operator {name!r}; pick identity, shift, cesaro, or custom")
