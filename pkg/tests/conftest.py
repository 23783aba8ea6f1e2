"""Shared fixtures and scale factories."""

from __future__ import annotations

import random

import pytest

import deltascale as ds


@pytest.fixture
def z_scale() -> ds.TimeScale:
    return ds.TimeScale.integers(0)


@pytest.fixture
def r_scale() -> ds.TimeScale:
    return ds.TimeScale.reals(0)


@pytest.fixture
def q_scale() -> ds.TimeScale:
    return ds.TimeScale.geometric(1, 2)


def hybrid_scale(intervals: int = 3) -> ds.TimeScale:
    """Union of [2k, 2k+1] for k < intervals, then the unit lattice."""
    blocks = [ds.ClosedInterval(2 * k, 2 * k + 1) for k in range(intervals)]
    return ds.TimeScale.union(blocks, ds.ArithmeticTail(2.0 * intervals, 1.0))


@pytest.fixture
def hybrid() -> ds.TimeScale:
    return hybrid_scale(3)


def random_scale(rng: random.Random) -> ds.TimeScale:
    """A scale of a random shape: pure lattice, half-line, or a mix."""
    kind = rng.choice(["integers", "reals", "arithmetic", "geometric", "hybrid", "points"])
    if kind == "integers":
        return ds.TimeScale.integers(rng.choice([0.0, 1.0, -3.0]))
    if kind == "reals":
        return ds.TimeScale.reals(rng.choice([0.0, -1.0, 2.5]))
    if kind == "arithmetic":
        return ds.TimeScale.arithmetic(rng.choice([0.0, 0.5]), rng.choice([0.25, 0.5, 2.0]))
    if kind == "geometric":
        return ds.TimeScale.geometric(rng.choice([1.0, 0.5]), rng.choice([1.5, 2.0, 3.0]))
    if kind == "points":
        base = rng.uniform(-1, 1)
        pts = sorted(base + rng.uniform(0.1, 1.5) * i for i in range(4))
        blocks = [ds.IsolatedPoint(p) for p in pts]
        return ds.TimeScale.union(blocks, ds.ArithmeticTail(pts[-1] + 1.0, rng.choice([0.5, 1.0])))
    blocks = []
    lo = rng.uniform(-2, 0)
    for _ in range(rng.randint(1, 3)):
        hi = lo + rng.uniform(0.5, 1.5)
        blocks.append(ds.ClosedInterval(lo, hi))
        lo = hi + rng.uniform(0.3, 1.2)
    return ds.TimeScale.union(blocks, ds.ArithmeticTail(lo + 0.5, 1.0))


def scale_points(ts: ds.TimeScale, count: int) -> list[float]:
    """Early points of any scale: natural jumps, unit hops across dense runs."""
    pts = [ts.minimum]
    t = pts[0]
    while len(pts) < count:
        s = ds.sigma(ts, t)
        t = s if s > t else ds.next_point_at_or_after(ts, t + 0.5)
        if t > pts[-1]:
            pts.append(t)
    return pts


def random_polynomial(rng: random.Random, degree: int = 3):
    """(coeffs, evaluator) for a random polynomial of modest degree."""
    coeffs = [rng.uniform(-3, 3) for _ in range(rng.randint(1, degree + 1))]

    def f(t: float) -> float:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    return coeffs, f
