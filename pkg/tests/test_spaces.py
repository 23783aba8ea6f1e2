"""Limit diagnosis, sup-norm sampling, membership evidence."""

import math
import random

import pytest

import deltascale as ds
from conftest import random_scale


class TestSupNorm:
    def test_constant(self, z_scale):
        one = ds.ScaleFunction(lambda t: 1.0, z_scale, 0)
        assert ds.sup_norm(one, horizon=100) == 1.0

    def test_decaying_max_at_origin(self, z_scale):
        f = ds.ScaleFunction(lambda t: 1.0 / (t + 1.0), z_scale, 0)
        assert ds.sup_norm(f, horizon=100) == 1.0

    def test_alternating_absolute(self, z_scale):
        f = ds.ScaleFunction(lambda t: (-1.0) ** t, z_scale, 0)
        assert ds.sup_norm(f, horizon=100) == 1.0

    def test_lower_bound_property(self, hybrid):
        f = ds.ScaleFunction(lambda t: math.sin(3 * t) * (2 + math.cos(t)), hybrid, 0)
        norm = ds.sup_norm(f, horizon=12)
        for t in (0.0, 0.5, 1.0, 2.0, 2.75, 3.0, 6.0, 9.0):
            assert norm >= abs(f.evaluator(t)) - 1e-12

    def test_monotone_in_horizon(self, z_scale):
        f = ds.ScaleFunction(lambda t: t / (t + 10.0), z_scale, 0)
        norms = [ds.sup_norm(f, horizon=h) for h in (10, 100, 1000)]
        assert norms == sorted(norms)


class TestLimitAtInfinity:
    def test_shifted_decay_on_integers(self, z_scale):
        f = ds.ScaleFunction(lambda t: 5.0 + 1.0 / (t + 1.0), z_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-6, horizon=1e7)
        assert diag.status == ds.CONVERGED
        assert diag.value == pytest.approx(5.0, abs=1e-6)
        assert diag.oscillation <= 1e-6

    def test_alternating_unknown(self, z_scale):
        f = ds.ScaleFunction(lambda t: (-1.0) ** t, z_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-6, horizon=1e5)
        assert diag.status == ds.UNKNOWN
        assert diag.oscillation == 2.0

    def test_zero_function(self, hybrid):
        zero = ds.ScaleFunction(lambda t: 0.0, hybrid, 0)
        diag = ds.limit_at_infinity(zero, tol=1e-9, horizon=1e4)
        assert diag.status == ds.CONVERGED
        assert diag.value == 0.0

    def test_unbounded_growth_diverges(self, z_scale):
        f = ds.ScaleFunction(lambda t: math.exp(min(t, 700.0)), z_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-6, horizon=1e5)
        assert diag.status == ds.DIVERGED

    def test_exponential_decay_on_reals(self, r_scale):
        f = ds.ScaleFunction(lambda t: math.exp(-t), r_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-8, horizon=1e4)
        assert diag.status == ds.CONVERGED
        assert diag.value == pytest.approx(0.0, abs=1e-8)

    def test_sine_unknown_on_reals(self, r_scale):
        f = ds.ScaleFunction(math.sin, r_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-3, horizon=1e5)
        assert diag.status == ds.UNKNOWN

    def test_horizon_snap_forward(self, z_scale):
        f = ds.ScaleFunction(lambda t: 1.0 / (t + 1.0), z_scale, 0)
        diag = ds.limit_at_infinity(f, tol=1e-3, horizon=1e5)
        assert diag.horizon >= 1e5

    def test_shift_equivariance(self):
        rng = random.Random(3)
        for _ in range(10):
            ts = random_scale(rng)
            c = rng.uniform(-5, 5)
            base = ds.ScaleFunction(lambda t: 1.0 / (1.0 + (t - ts.minimum)), ts, ts.minimum)
            shifted = ds.ScaleFunction(lambda t: base.evaluator(t) + c, ts, ts.minimum)
            d0 = ds.limit_at_infinity(base, tol=1e-4, horizon=1e6)
            d1 = ds.limit_at_infinity(shifted, tol=1e-4, horizon=1e6)
            assert d0.status == ds.CONVERGED and d1.status == ds.CONVERGED
            assert d1.value == pytest.approx(d0.value + c, abs=1e-9)

    def test_rejects_bad_arguments(self, z_scale):
        f = ds.ScaleFunction(lambda t: 0.0, z_scale, 0)
        with pytest.raises(ValueError):
            ds.limit_at_infinity(f, tol=0.0)
        with pytest.raises(ValueError):
            ds.limit_at_infinity(f, tol=1e-6, window=1)


class TestMembership:
    def test_decaying_in_c0(self, z_scale):
        f = ds.ScaleFunction(lambda t: 1.0 / (t + 1.0), z_scale, 0)
        rep = ds.membership_report(f)
        assert rep.in_c0 == ds.Verdict.EVIDENCE_FOR
        assert rep.in_c == ds.Verdict.EVIDENCE_FOR

    def test_constant_in_c_not_c0(self, z_scale):
        f = ds.ScaleFunction(lambda t: 3.0, z_scale, 0)
        rep = ds.membership_report(f)
        assert rep.in_c == ds.Verdict.EVIDENCE_FOR
        assert rep.in_c0 == ds.Verdict.EVIDENCE_AGAINST
        assert rep.sup_norm == 3.0

    def test_sine_inconclusive(self, r_scale):
        f = ds.ScaleFunction(math.sin, r_scale, 0)
        rep = ds.membership_report(f, ds.MembershipConfig(tol=1e-4, horizon=1e5))
        assert rep.in_c == ds.Verdict.INCONCLUSIVE
        assert rep.in_c0 == ds.Verdict.INCONCLUSIVE

    def test_growth_against(self, z_scale):
        f = ds.ScaleFunction(lambda t: math.exp(min(t, 700.0)), z_scale, 0)
        rep = ds.membership_report(f, ds.MembershipConfig(horizon=1e5))
        assert rep.in_c == ds.Verdict.EVIDENCE_AGAINST
        assert rep.in_c0 == ds.Verdict.EVIDENCE_AGAINST

    def test_discrete_reduction_matches_sequence_diagnosis(self, z_scale):
        seq = lambda n: (0.5) ** n + 2.0
        f = ds.ScaleFunction(lambda t: seq(t), z_scale, 0)
        rep = ds.membership_report(f)
        assert rep.in_c == ds.Verdict.EVIDENCE_FOR
        assert rep.limit.value == pytest.approx(2.0, abs=1e-6)
