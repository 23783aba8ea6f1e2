"""Time scales: closed, unbounded-above subsets of the reals.

A scale is a finite run of building blocks (closed intervals, isolated
points) followed by an unbounded tail: a half-line, an arithmetic or
geometric lattice, or a caller-supplied point generator.  All jump/
graininess operators, point classification, and the segment decomposition
of bounded windows live here.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterator, Union


class NotInScaleError(ValueError):
    """A queried point does not belong to the time scale."""


class DenseRunError(ValueError):
    """Full point enumeration hit a dense run."""


class DescriptorError(ValueError):
    """Malformed time-scale JSON descriptor."""


# ---------------------------------------------------------------------------
# Building blocks and tails


@dataclass(frozen=True)
class Block:
    """Closed interval [lo, hi]; an isolated point when lo == hi."""

    lo: float
    hi: float

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


def ClosedInterval(lo: float, hi: float) -> Block:
    if not lo <= hi:
        raise ValueError(f"interval needs lo <= hi, got [{lo}, {hi}]")
    return Block(float(lo), float(hi))


def IsolatedPoint(p: float) -> Block:
    return Block(float(p), float(p))


@dataclass(frozen=True)
class HalfLine:
    start: float


@dataclass(frozen=True)
class ArithmeticTail:
    start: float
    step: float

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError(f"arithmetic step must be positive, got {self.step}")


@dataclass(frozen=True)
class GeometricTail:
    start: float
    ratio: float

    def __post_init__(self) -> None:
        if not self.start > 0:
            raise ValueError(f"geometric start must be positive, got {self.start}")
        if not self.ratio > 1:
            raise ValueError(f"geometric ratio must exceed 1, got {self.ratio}")


class GeneratedTail:
    """Tail defined by a strictly increasing, unbounded point generator.

    ``next_after(t)`` must return the smallest generator point strictly
    greater than t for any t >= start.  The contract is trusted but the
    first 10_000 calls are spot-checked for strict growth.
    """

    _SPOT_CHECKS = 10_000

    def __init__(self, start: float, next_after: Callable[[float], float]):
        self.start = float(start)
        self._next_after = next_after
        self._points: list[float] = [self.start]
        self._checked = 0

    def _grow(self) -> None:
        last = self._points[-1]
        nxt = float(self._next_after(last))
        if self._checked < self._SPOT_CHECKS:
            self._checked += 1
            if not nxt > last:
                raise ValueError(f"generated tail is not strictly increasing: next({last}) = {nxt}")
        self._points.append(nxt)

    def extend_past(self, t: float) -> list[float]:
        while self._points[-1] <= t:
            self._grow()
        return self._points

    def __repr__(self) -> str:
        return f"GeneratedTail(start={self.start})"


Tail = Union[HalfLine, ArithmeticTail, GeometricTail, GeneratedTail]


# ---------------------------------------------------------------------------
# Point classification and segments


@dataclass(frozen=True)
class PointClass:
    right_scattered: bool
    right_dense: bool
    left_scattered: bool
    left_dense: bool

    @property
    def isolated(self) -> bool:
        return self.right_scattered and self.left_scattered

    @property
    def dense(self) -> bool:
        return self.right_dense and self.left_dense


@dataclass(frozen=True)
class DenseRun:
    lo: float
    hi: float


@dataclass(frozen=True)
class Jump:
    at: float
    gap: float


Segment = Union[DenseRun, Jump]


# ---------------------------------------------------------------------------
# The scale itself


@dataclass(frozen=True)
class TimeScale:
    components: tuple[Block, ...]
    tail: Tail
    snap: float = 1e-12
    _los: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        blocks = _canonicalize(self.components)
        object.__setattr__(self, "components", blocks)
        if blocks:
            last_hi = blocks[-1].hi
            if not self.tail.start > last_hi:
                raise ValueError(
                    f"tail start {self.tail.start} must strictly exceed the last component's sup {last_hi}"
                )
        object.__setattr__(self, "_los", tuple(b.lo for b in blocks))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def reals(start: float = 0.0) -> "TimeScale":
        return TimeScale((), HalfLine(float(start)))

    @staticmethod
    def integers(start: float = 0.0) -> "TimeScale":
        return TimeScale((), ArithmeticTail(float(start), 1.0))

    @staticmethod
    def arithmetic(start: float, step: float) -> "TimeScale":
        return TimeScale((), ArithmeticTail(float(start), float(step)))

    @staticmethod
    def geometric(start: float, ratio: float) -> "TimeScale":
        return TimeScale((), GeometricTail(float(start), float(ratio)))

    @staticmethod
    def union(blocks: "list[Block] | tuple[Block, ...]", tail: Tail) -> "TimeScale":
        return TimeScale(tuple(blocks), tail)

    @staticmethod
    def generated(start: float, next_after: Callable[[float], float]) -> "TimeScale":
        return TimeScale((), GeneratedTail(start, next_after))

    # -- basic queries ------------------------------------------------------

    @property
    def minimum(self) -> float:
        return self.components[0].lo if self.components else self.tail.start

    def _find(self, t: float) -> float | None:
        """Snap t to the scale; None when t is not a scale point."""
        snap = self.snap
        if self.components and t <= self.components[-1].hi + snap:
            i = bisect_right(self._los, t) - 1
            for j in (i, i + 1):
                if 0 <= j < len(self.components):
                    b = self.components[j]
                    if b.lo - snap <= t <= b.hi + snap:
                        if abs(t - b.lo) <= snap:
                            return b.lo
                        if abs(t - b.hi) <= snap:
                            return b.hi
                        return t
            return None
        return _tail_find(self.tail, t, snap)

    def locate(self, t: float) -> float:
        got = self._find(float(t))
        if got is None:
            raise NotInScaleError(f"{t} is not a point of the time scale")
        return got


def _canonicalize(blocks: tuple[Block, ...]) -> tuple[Block, ...]:
    """Merge overlapping/touching blocks; result strictly increasing with gaps."""
    if not blocks:
        return ()
    ordered = sorted(blocks, key=lambda b: (b.lo, b.hi))
    merged: list[Block] = [ordered[0]]
    for b in ordered[1:]:
        cur = merged[-1]
        if b.lo <= cur.hi:
            if b.hi > cur.hi:
                merged[-1] = Block(cur.lo, b.hi)
        else:
            merged.append(b)
    return tuple(merged)


# ---------------------------------------------------------------------------
# Tail point arithmetic


def _tail_find(tail: Tail, t: float, snap: float) -> float | None:
    if isinstance(tail, HalfLine):
        if t >= tail.start - snap:
            return max(t, tail.start)
        return None
    if isinstance(tail, ArithmeticTail):
        if t < tail.start - snap:
            return None
        k = round((t - tail.start) / tail.step)
        if k < 0:
            k = 0
        p = tail.start + k * tail.step
        return p if abs(p - t) <= snap else None
    if isinstance(tail, GeometricTail):
        if t < tail.start - snap or t <= 0:
            return None
        k = round(math.log(t / tail.start) / math.log(tail.ratio))
        if k < 0:
            k = 0
        p = tail.start * tail.ratio**k
        return p if abs(p - t) <= snap else None
    if t < tail.start - snap:
        return None
    pts = tail.extend_past(t + snap)
    i = bisect_left(pts, t - snap)
    if i < len(pts) and abs(pts[i] - t) <= snap:
        return pts[i]
    return None


def _tail_index(tail: ArithmeticTail | GeometricTail, t: float) -> int:
    if isinstance(tail, ArithmeticTail):
        return max(0, round((t - tail.start) / tail.step))
    return max(0, round(math.log(t / tail.start) / math.log(tail.ratio)))


def _tail_point(tail: ArithmeticTail | GeometricTail, k: int) -> float:
    if isinstance(tail, ArithmeticTail):
        return tail.start + k * tail.step
    return tail.start * tail.ratio**k


def _tail_sigma(tail: Tail, t: float) -> float:
    """Forward jump inside the tail region (t is an exact tail point)."""
    if isinstance(tail, HalfLine):
        return t
    if isinstance(tail, (ArithmeticTail, GeometricTail)):
        return _tail_point(tail, _tail_index(tail, t) + 1)
    pts = tail.extend_past(t)
    return pts[bisect_right(pts, t)]


def _tail_rho(tail: Tail, t: float) -> float | None:
    """Backward jump inside the tail; None when t is the tail's first point."""
    if isinstance(tail, HalfLine):
        return t if t > tail.start else None
    if isinstance(tail, (ArithmeticTail, GeometricTail)):
        k = _tail_index(tail, t)
        return _tail_point(tail, k - 1) if k >= 1 else None
    if t <= tail.start:
        return None
    pts = tail.extend_past(t)
    i = bisect_left(pts, t)
    return pts[i - 1] if i >= 1 else None


def _tail_first_at_or_after(tail: Tail, t: float, snap: float) -> float:
    """Smallest tail point >= t (t may be off-lattice)."""
    if t <= tail.start:
        return tail.start
    if isinstance(tail, HalfLine):
        return t
    if isinstance(tail, (ArithmeticTail, GeometricTail)):
        if isinstance(tail, ArithmeticTail):
            k = math.ceil((t - tail.start) / tail.step - snap)
        else:
            k = math.ceil(math.log(t / tail.start) / math.log(tail.ratio) - snap)
        k = max(0, k)
        p = _tail_point(tail, k)
        while p < t - snap:
            k += 1
            p = _tail_point(tail, k)
        return p
    pts = tail.extend_past(t)
    return pts[bisect_left(pts, t - snap)]


# ---------------------------------------------------------------------------
# Jump operators


def contains(ts: TimeScale, t: float) -> bool:
    return ts._find(float(t)) is not None


def sigma(ts: TimeScale, t: float) -> float:
    """Forward jump: inf of scale points strictly greater than t."""
    t = ts.locate(t)
    for i, b in enumerate(ts.components):
        if b.lo <= t <= b.hi:
            if t < b.hi:
                return t
            if i + 1 < len(ts.components):
                return ts.components[i + 1].lo
            return ts.tail.start
    return _tail_sigma(ts.tail, t)


def rho(ts: TimeScale, t: float) -> float:
    """Backward jump: sup of scale points strictly less than t.

    At the scale minimum, returns the minimum itself.
    """
    t = ts.locate(t)
    if t == ts.minimum:
        return t
    for i, b in enumerate(ts.components):
        if b.lo <= t <= b.hi:
            if t > b.lo:
                return t
            return ts.components[i - 1].hi
    prev = _tail_rho(ts.tail, t)
    if prev is not None:
        return prev
    return ts.components[-1].hi


def graininess(ts: TimeScale, t: float) -> float:
    t = ts.locate(t)
    return sigma(ts, t) - t


def classify(ts: TimeScale, t: float) -> PointClass:
    t = ts.locate(t)
    s = sigma(ts, t)
    r = rho(ts, t)
    return PointClass(
        right_scattered=s > t,
        right_dense=s == t,
        left_scattered=r < t,
        left_dense=r == t,
    )


# ---------------------------------------------------------------------------
# Segment decomposition


def _dense_run_end(ts: TimeScale, t: float) -> float:
    """Right end of the maximal dense run containing the right-dense t."""
    for b in ts.components:
        if b.lo <= t < b.hi:
            return b.hi
    return math.inf  # half-line tail


def iter_parts(ts: TimeScale, a: float, b: float) -> Iterator[tuple]:
    """Yield ('dense', lo, hi) / ('jump', at, gap) tiling [a, b] in order.

    Lattice tails are enumerated by index, so huge discrete stretches
    stream without per-point operator dispatch.
    """
    a = ts.locate(a)
    b = ts.locate(b)
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    t = a
    tail = ts.tail
    while t < b:
        if isinstance(tail, (ArithmeticTail, GeometricTail)) and t >= tail.start:
            k0 = _tail_index(tail, t)
            k1 = _tail_index(tail, b)
            p = _tail_point(tail, k0)
            for k in range(k0 + 1, k1 + 1):
                nxt = _tail_point(tail, k)
                yield ("jump", p, nxt - p)
                p = nxt
            return
        s = sigma(ts, t)
        if s == t:
            end = min(_dense_run_end(ts, t), b)
            yield ("dense", t, end)
            t = end
        else:
            if s > b:
                return
            yield ("jump", t, s - t)
            t = s


def decompose(ts: TimeScale, a: float, b: float) -> list[Segment]:
    """Tile [a, b] of the scale into dense runs and jumps."""
    out: list[Segment] = []
    for part in iter_parts(ts, a, b):
        if part[0] == "dense":
            out.append(DenseRun(part[1], part[2]))
        else:
            out.append(Jump(part[1], part[2]))
    return out


def next_point_at_or_after(ts: TimeScale, x: float) -> float:
    """Smallest scale point >= x (snap-forward)."""
    x = float(x)
    got = ts._find(x)
    if got is not None:
        return got
    for b in ts.components:
        if b.lo >= x:
            return b.lo
        if b.lo <= x <= b.hi:
            return x
    return _tail_first_at_or_after(ts.tail, x, ts.snap)


def prev_point_at_or_before(ts: TimeScale, x: float) -> float:
    """Largest scale point <= x; raises below the scale minimum."""
    x = float(x)
    got = ts._find(x)
    if got is not None:
        return got
    if x < ts.minimum:
        raise NotInScaleError(f"no scale point at or below {x}")
    tail = ts.tail
    if x > tail.start:
        if isinstance(tail, HalfLine):
            return x
        if isinstance(tail, (ArithmeticTail, GeometricTail)):
            k = _tail_index(tail, x)
            p = _tail_point(tail, k)
            while p > x + ts.snap:
                k -= 1
                p = _tail_point(tail, k)
            return p if k >= 0 else tail.start
        pts = tail.extend_past(x)
        return pts[bisect_right(pts, x) - 1]
    i = bisect_right(ts._los, x) - 1
    if i < 0:
        raise NotInScaleError(f"no scale point at or below {x}")
    return min(ts.components[i].hi, x) if ts.components[i].lo <= x <= ts.components[i].hi else ts.components[i].hi


def enumerate_points(ts: TimeScale, a: float, limit: int, scattered_only: bool = False) -> list[float]:
    """Strictly increasing points of the scale from a, at most `limit` of them.

    Full mode raises DenseRunError when it meets a dense run; scattered
    mode instead collects only right-scattered anchor points, hopping over
    dense runs (and stops early if the scale stays dense forever).
    """
    t = ts.locate(a)
    out: list[float] = []
    while len(out) < limit:
        s = sigma(ts, t)
        if s > t:
            out.append(t)
            t = s
        else:
            if not scattered_only:
                raise DenseRunError(f"dense run at {t}; use scattered mode or a discrete scale")
            end = _dense_run_end(ts, t)
            if math.isinf(end):
                break
            t = end
    return out


# ---------------------------------------------------------------------------
# JSON descriptors


_TAIL_KINDS = ("halfline", "arithmetic", "geometric")


def _parse_tail(obj: dict) -> Tail:
    kind = obj.get("kind")
    try:
        if kind == "halfline":
            return HalfLine(float(obj["start"]))
        if kind == "arithmetic":
            return ArithmeticTail(float(obj["start"]), float(obj["step"]))
        if kind == "geometric":
            return GeometricTail(float(obj["start"]), float(obj["ratio"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DescriptorError(f"bad tail descriptor {obj!r}: {exc}") from exc
    raise DescriptorError(f"tail kind must be one of {_TAIL_KINDS}, got {kind!r}")


def parse_descriptor(spec: "str | dict") -> TimeScale:
    """Build a TimeScale from its JSON descriptor (or shorthand name)."""
    if isinstance(spec, str):
        text = spec.strip()
        if text == "reals":
            return TimeScale.reals(0.0)
        if text == "integers":
            return TimeScale.integers(0.0)
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"not a scale descriptor: {text!r}") from exc
    if not isinstance(spec, dict):
        raise DescriptorError(f"scale descriptor must be an object, got {type(spec).__name__}")
    kind = spec.get("kind")
    try:
        if kind == "reals":
            return TimeScale.reals(float(spec.get("start", 0.0)))
        if kind == "integers":
            return TimeScale.integers(float(spec.get("start", 0.0)))
        if kind == "arithmetic":
            return TimeScale.arithmetic(float(spec["start"]), float(spec["step"]))
        if kind == "geometric":
            return TimeScale.geometric(float(spec["start"]), float(spec["ratio"]))
        if kind == "union":
            blocks = []
            for item in spec["blocks"]:
                if "interval" in item:
                    lo, hi = item["interval"]
                    blocks.append(ClosedInterval(float(lo), float(hi)))
                elif "point" in item:
                    blocks.append(IsolatedPoint(float(item["point"])))
                else:
                    raise DescriptorError(f"block must carry 'interval' or 'point': {item!r}")
            return TimeScale.union(blocks, _parse_tail(spec["tail"]))
    except DescriptorError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DescriptorError(f"bad scale descriptor {spec!r}: {exc}") from exc
    raise DescriptorError(f"unknown scale kind {kind!r}")


def to_descriptor(ts: TimeScale) -> dict:
    """Inverse of parse_descriptor for serializable scales."""
    tail = ts.tail
    if isinstance(tail, HalfLine):
        tail_obj: dict = {"kind": "halfline", "start": tail.start}
    elif isinstance(tail, ArithmeticTail):
        tail_obj = {"kind": "arithmetic", "start": tail.start, "step": tail.step}
    elif isinstance(tail, GeometricTail):
        tail_obj = {"kind": "geometric", "start": tail.start, "ratio": tail.ratio}
    else:
        raise DescriptorError("generated tails have no JSON descriptor")
    if not ts.components:
        if isinstance(tail, HalfLine):
            return {"kind": "reals", "start": tail.start}
        if isinstance(tail, ArithmeticTail) and tail.step == 1.0:
            return {"kind": "integers", "start": tail.start}
        if isinstance(tail, ArithmeticTail):
            return {"kind": "arithmetic", "start": tail.start, "step": tail.step}
        return {"kind": "geometric", "start": tail.start, "ratio": tail.ratio}
    blocks = []
    for b in ts.components:
        if b.is_point:
            blocks.append({"point": b.lo})
        else:
            blocks.append({"interval": [b.lo, b.hi]})
    return {"kind": "union", "blocks": blocks, "tail": tail_obj}
