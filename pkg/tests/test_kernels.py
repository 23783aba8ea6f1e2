"""Kernel transforms, regularity evidence, operator-norm witnesses."""

import math

import pytest

import deltascale as ds


def cesaro_kernel(z: ds.TimeScale, gain: float = 1.0) -> ds.Kernel:
    return ds.Kernel(lambda x, t: gain / (x + 1.0) if t <= x else 0.0, z, 0.0, z, 0.0)


def alternating_kernel(z: ds.TimeScale) -> ds.Kernel:
    return ds.Kernel(lambda x, t: (-1.0) ** t / (x + 1.0) if t <= x else 0.0, z, 0.0, z, 0.0)


def exp_kernel() -> ds.Kernel:
    r = ds.TimeScale.reals(0.5)
    t = ds.TimeScale.reals(0.0)
    return ds.Kernel(lambda x, t_: math.exp(-t_ / x) / x, r, 0.5, t, 0.0)


@pytest.fixture
def cesaro(z_scale):
    return cesaro_kernel(z_scale)


@pytest.fixture
def doubled(z_scale):
    return cesaro_kernel(z_scale, gain=2.0)


@pytest.fixture
def alternating(z_scale):
    return alternating_kernel(z_scale)


class TestApplyTransform:
    def test_cesaro_row_sums_to_one(self, cesaro):
        one = ds.ScaleFunction(lambda t: 1.0, cesaro.t_scale, 0.0)
        for n in (0, 1, 4, 9):
            r = ds.apply_transform(cesaro, one, n, tol=1e-9)
            assert r.converged
            assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_exp_kernel_unit_mass(self):
        k = exp_kernel()
        one = ds.ScaleFunction(lambda t: 1.0, k.t_scale, 0.0)
        r = ds.apply_transform(k, one, 2.0, tol=1e-6)
        assert r.converged
        assert r.value == pytest.approx(1.0, abs=1e-6)

    def test_zero_kernel(self, z_scale):
        k = ds.Kernel(lambda x, t: 0.0, z_scale, 0.0, z_scale, 0.0)
        f = ds.ScaleFunction(lambda t: math.sin(t) + 2.0, z_scale, 0.0)
        assert ds.apply_transform(k, f, 3, tol=1e-9).value == 0.0

    def test_cesaro_cancels_alternating_signs(self, cesaro):
        f = ds.ScaleFunction(lambda t: (-1.0) ** t, cesaro.t_scale, 0.0)
        r = ds.apply_transform(cesaro, f, 5, tol=1e-9)
        assert r.value == 0.0

    def test_x_outside_scale_rejected(self, cesaro):
        one = ds.ScaleFunction(lambda t: 1.0, cesaro.t_scale, 0.0)
        with pytest.raises(ds.NotInScaleError):
            ds.apply_transform(cesaro, one, 2.5)

    def test_linearity(self, cesaro):
        f = ds.ScaleFunction(lambda t: 1.0 / (t + 1.0), cesaro.t_scale, 0.0)
        g = ds.ScaleFunction(lambda t: 2.0 ** (-t), cesaro.t_scale, 0.0)
        alpha = -2.5
        combo = ds.ScaleFunction(lambda t: alpha * f.evaluator(t) + g.evaluator(t), cesaro.t_scale, 0.0)
        tol = 1e-8
        for x in (3, 10, 33):
            lhs = ds.apply_transform(cesaro, combo, x, tol=tol).value
            rhs = alpha * ds.apply_transform(cesaro, f, x, tol=tol).value
            rhs += ds.apply_transform(cesaro, g, x, tol=tol).value
            assert abs(lhs - rhs) <= 2 * tol * (1 + abs(alpha))

    def test_constant_shift_identity(self, cesaro):
        s = 3.0
        f = ds.ScaleFunction(lambda t: s + 1.0 / (t + 1.0), cesaro.t_scale, 0.0)
        centered = ds.ScaleFunction(lambda t: f.evaluator(t) - s, cesaro.t_scale, 0.0)
        one = ds.ScaleFunction(lambda t: 1.0, cesaro.t_scale, 0.0)
        tol = 1e-8
        for x in (4, 17):
            whole = ds.apply_transform(cesaro, f, x, tol=tol).value
            parts = ds.apply_transform(cesaro, centered, x, tol=tol).value
            parts += s * ds.apply_transform(cesaro, one, x, tol=tol).value
            assert abs(whole - parts) <= 2 * tol * (1 + abs(s))


class TestEstimateM:
    def test_cesaro(self, cesaro):
        assert ds.estimate_M(cesaro, x_horizon=256.0) == pytest.approx(1.0, abs=1e-12)

    def test_doubled(self, doubled):
        assert ds.estimate_M(doubled, x_horizon=256.0) == pytest.approx(2.0, abs=1e-12)

    def test_alternating_absolute_mass(self, alternating):
        assert ds.estimate_M(alternating, x_horizon=256.0) == pytest.approx(1.0, abs=1e-12)

    def test_explicit_probes(self, cesaro):
        assert ds.estimate_M(cesaro, x_probes=[0.0, 7.0]) == pytest.approx(1.0, abs=1e-12)


class TestConditionI:
    def test_vacuous_on_integer_x_scale(self, cesaro):
        res = ds.check_condition_i(cesaro, cfg=ds.ProbeConfig(x_horizon=64.0))
        assert res.passed
        assert all(v == 0.0 for _, v in res.witnesses)

    def test_exp_kernel_continuous(self):
        k = exp_kernel()
        cfg = ds.ProbeConfig(integral_tol=1e-9)
        res = ds.check_condition_i(k, x0_samples=[1.0], cfg=cfg)
        assert res.passed
        gaps = [v for _, v in res.witnesses]
        assert gaps[-1] < gaps[0]

    def test_step_kernel_discontinuity_fails(self, z_scale):
        x_scale = ds.TimeScale.reals(0.0)
        step = ds.Kernel(lambda x, t: 1.0 if t <= x <= t + 1.0 else 0.0, x_scale, 0.0, z_scale, 0.0)
        res = ds.check_condition_i(step, x0_samples=[3.0], cfg=ds.ProbeConfig())
        assert not res.passed


class TestConditionIII:
    def test_cesaro_prefix_mass_dies(self, cesaro):
        res = ds.check_condition_iii(cesaro, y_samples=[5.0], cfg=ds.ProbeConfig())
        assert res.passed

    def test_diagonal_kernel_passes(self, z_scale):
        diag = ds.Kernel(lambda x, t: 1.0 if x == t else 0.0, z_scale, 0.0, z_scale, 0.0)
        res = ds.check_condition_iii(diag, y_samples=[5.0], cfg=ds.ProbeConfig(x_horizon=4096.0))
        assert res.passed

    def test_first_column_kernel_fails(self, z_scale):
        k = ds.Kernel(lambda x, t: 1.0 if t == 0.0 else 0.0, z_scale, 0.0, z_scale, 0.0)
        res = ds.check_condition_iii(k, y_samples=[5.0], cfg=ds.ProbeConfig(x_horizon=4096.0))
        assert not res.passed

    def test_exp_kernel_passes(self):
        k = exp_kernel()
        res = ds.check_condition_iii(k, y_samples=[1.0], cfg=ds.ProbeConfig(x_horizon=4096.0))
        assert res.passed


class TestConditionIV:
    def test_cesaro_rows_at_one(self, cesaro):
        res = ds.check_condition_iv(cesaro, cfg=ds.ProbeConfig(x_horizon=256.0))
        assert res.passed

    def test_doubled_rows_fail(self, doubled):
        res = ds.check_condition_iv(doubled, cfg=ds.ProbeConfig(x_horizon=256.0))
        assert not res.passed

    def test_exp_kernel_rows_at_one(self):
        k = exp_kernel()
        res = ds.check_condition_iv(k, cfg=ds.ProbeConfig(x_horizon=512.0))
        assert res.passed


class TestRegularityReport:
    def test_cesaro_regular(self, cesaro):
        rep = ds.regularity_report(cesaro, ds.ProbeConfig(x_horizon=1024.0, y_count=4))
        assert rep.verdict == ds.RegularityVerdict.EVIDENCE_REGULAR
        assert rep.failed == ()
        assert rep.m_estimate == pytest.approx(1.0, abs=1e-12)

    def test_doubled_preserves_c0_only(self, doubled):
        rep = ds.regularity_report(doubled, ds.ProbeConfig(x_horizon=1024.0, y_count=4))
        assert rep.verdict == ds.RegularityVerdict.EVIDENCE_C0_PRESERVING
        assert rep.failed == ("iv",)

    def test_first_column_kernel_fails_iii(self, z_scale):
        k = ds.Kernel(lambda x, t: 1.0 if t == 0.0 else 0.0, z_scale, 0.0, z_scale, 0.0)
        rep = ds.regularity_report(k, ds.ProbeConfig(x_horizon=1024.0, y_count=4))
        assert rep.verdict == ds.RegularityVerdict.EVIDENCE_FAILS
        assert "iii" in rep.failed

    def test_expression_kernel_regular(self, z_scale):
        k = ds.Kernel.from_expression("if(t<=x, 1/(x+1), 0)", z_scale, 0.0, z_scale, 0.0)
        rep = ds.regularity_report(k, ds.ProbeConfig(x_horizon=1024.0, y_count=4))
        assert rep.verdict == ds.RegularityVerdict.EVIDENCE_REGULAR

    def test_regular_kernel_preserves_limits(self, cesaro):
        s = -1.5
        f = ds.ScaleFunction(lambda t: s + 1.0 / (t + 1.0), cesaro.t_scale, 0.0)
        lf = ds.ScaleFunction(lambda x: ds.apply_transform(cesaro, f, x, tol=1e-4).value, cesaro.x_scale, 0.0)
        diag = ds.limit_at_infinity(lf, tol=5e-3, window=3, horizon=8192.0)
        assert diag.status == ds.CONVERGED
        assert diag.value == pytest.approx(s, abs=2e-3)


class TestExtremalFunction:
    def test_cesaro_all_positive(self, cesaro):
        # sgn of the x0=4 row: 1 on its support k <= 4, 0 where the row is 0
        f = ds.extremal_function(cesaro, 4.0, 10.0)
        assert [f.evaluator(float(k)) for k in range(12)] == [1.0] * 5 + [0.0] * 7
        r = ds.apply_transform(cesaro, f, 4.0, tol=1e-9)
        assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_alternating_signs_cancel(self, alternating):
        f = ds.extremal_function(alternating, 3.0, 3.0)
        assert [f.evaluator(float(k)) for k in range(4)] == [1.0, -1.0, 1.0, -1.0]
        r = ds.apply_transform(alternating, f, 3.0, tol=1e-9)
        assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_zero_slice_rejected(self, z_scale):
        k = ds.Kernel(lambda x, t: 0.0, z_scale, 0.0, z_scale, 0.0)
        with pytest.raises(ValueError):
            ds.extremal_function(k, 3.0, 5.0)


class TestOperatorNormLowerBound:
    def test_cesaro_attains_m(self, cesaro):
        lb = ds.operator_norm_lower_bound(cesaro, [4.0, 64.0], [128.0])
        assert lb == pytest.approx(1.0, abs=1e-12)

    def test_doubled(self, doubled):
        lb = ds.operator_norm_lower_bound(doubled, [16.0], [64.0])
        assert lb == pytest.approx(2.0, abs=1e-12)

    def test_zero_kernel(self, z_scale):
        k = ds.Kernel(lambda x, t: 0.0, z_scale, 0.0, z_scale, 0.0)
        assert ds.operator_norm_lower_bound(k, [1.0, 2.0], [8.0]) == 0.0

    def test_norm_sandwich(self, cesaro, doubled, alternating):
        for k in (cesaro, doubled, alternating):
            m = ds.estimate_M(k, x_horizon=128.0)
            lb = ds.operator_norm_lower_bound(k, [1.0, 9.0, 31.0], [64.0, 127.0])
            assert lb <= m + 1e-9

    def test_transform_bounded_by_m_times_norm(self, cesaro, alternating):
        fns = [
            ds.ScaleFunction(lambda t: math.cos(t) / (1.0 + t), None, 0.0),
            ds.ScaleFunction(lambda t: (-1.0) ** t * 0.75, None, 0.0),
        ]
        for k in (cesaro, alternating):
            m = ds.estimate_M(k, x_horizon=128.0)
            for f in fns:
                sf = ds.ScaleFunction(f.evaluator, k.t_scale, 0.0)
                norm_f = ds.sup_norm(sf, horizon=256.0)
                worst = max(abs(ds.apply_transform(k, sf, x, tol=1e-9).value) for x in (0.0, 3.0, 17.0, 64.0))
                assert worst <= m * norm_f + 1e-6


class TestKernelExpressionAdapter:
    def test_rejects_unknown_variables(self, z_scale):
        with pytest.raises(Exception):
            ds.Kernel.from_expression("t+y", z_scale, 0.0, z_scale, 0.0)

    def test_scale_function_rejects_x(self, z_scale):
        with pytest.raises(Exception):
            ds.ScaleFunction.from_expression("x+1", z_scale, 0.0)
