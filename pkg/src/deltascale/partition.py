"""Partitions of bounded scale intervals with the delta-gap property.

A partition a = t_0 < ... < t_n = b qualifies for mesh delta when every
gap either is at most delta or jumps a hole of the scale, i.e.
t_i - t_{i-1} > delta and rho(t_i) = t_{i-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

from .timescale import TimeScale, iter_parts, rho


@dataclass(frozen=True)
class Partition:
    points: tuple[float, ...]

    def __post_init__(self) -> None:
        pts = self.points
        if len(pts) < 2:
            raise ValueError("a partition needs at least two points")
        for u, v in zip(pts, pts[1:]):
            if not u < v:
                raise ValueError(f"partition points must strictly increase: {u} !< {v}")

    @property
    def a(self) -> float:
        return self.points[0]

    @property
    def b(self) -> float:
        return self.points[-1]

    def gaps(self) -> list[float]:
        return [v - u for u, v in zip(self.points, self.points[1:])]


def make_delta_partition(ts: TimeScale, a: float, b: float, delta: float) -> Partition:
    """Construct a delta-qualified partition of [a, b].

    Dense runs are stepped with gaps of exactly delta (shorter final step);
    every jump contributes both of its endpoints, so gaps above delta only
    occur across holes of the scale.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    a = ts.locate(a)
    b = ts.locate(b)
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    pts: list[float] = [a]
    for part in iter_parts(ts, a, b):
        if part[0] == "dense":
            _, lo, hi = part
            i = 1
            nxt = lo + delta
            while nxt < hi - ts.snap:
                pts.append(nxt)
                i += 1
                nxt = lo + i * delta
            pts.append(hi)
        else:
            _, at, gap = part
            pts.append(at + gap)
    dedup = [pts[0]]
    for p in pts[1:]:
        if p > dedup[-1]:
            dedup.append(p)
    return Partition(tuple(dedup))


def verify_delta_property(ts: TimeScale, p: Partition, delta: float) -> bool:
    """Check the delta-gap disjunction on every consecutive pair."""
    slack = ts.snap + abs(delta) * 1e-12
    for u, v in zip(p.points, p.points[1:]):
        gap = v - u
        if gap <= delta + slack:
            continue
        if abs(rho(ts, v) - u) > ts.snap:
            return False
    return True


def refine(ts: TimeScale, p: Partition) -> Partition:
    """Halve every dense gap; jump gaps are left alone (nothing in between).

    Dense pieces inside a gap also contribute their endpoints, so mixed
    gaps get snapped to the scale structure as they are refined.
    """
    out = set(p.points)
    for u, v in zip(p.points, p.points[1:]):
        for part in iter_parts(ts, u, v):
            if part[0] == "dense":
                _, lo, hi = part
                out.add(lo)
                out.add(hi)
                if hi - lo > 2 * ts.snap:
                    out.add((lo + hi) / 2.0)
            else:
                _, at, gap = part
                out.add(at)
                out.add(at + gap)
    return Partition(tuple(sorted(out)))
