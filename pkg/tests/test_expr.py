"""Expression language: grammar, evaluation, rendering."""

import math

import pytest
from hypothesis import given, strategies as st

from deltascale import expr


def ev(src: str, **bindings: float) -> float:
    return expr.evaluate(expr.parse(src), bindings)


class TestParsePositive:
    def test_linear(self):
        assert ev("2*t+1", t=3) == 7.0

    def test_conditional_with_comparison(self):
        assert ev("if(t<=x, 1/(x+1), 0)", x=4, t=2) == pytest.approx(0.2)
        assert ev("if(t<=x, 1/(x+1), 0)", x=4, t=9) == 0.0

    def test_precedence_pow_over_unary_minus(self):
        assert ev("-2^2") == -4.0

    def test_pow_right_associative(self):
        assert ev("2^3^2") == 512.0

    def test_pow_with_unary_exponent(self):
        assert ev("2^-1") == 0.5

    def test_mul_div_left_associative(self):
        assert ev("12/3/2") == 2.0

    def test_number_forms(self):
        assert ev("1.5e2") == 150.0
        assert ev(".5") == 0.5
        assert ev("2E-1") == 0.2

    def test_nested_calls(self):
        assert ev("max(min(1, 2), floor(2.7))") == 2.0

    def test_parenthesized(self):
        assert ev("(2+t)*3", t=1) == 9.0


class TestParseNegative:
    def test_double_star_rejected_at_offset_2(self):
        with pytest.raises(expr.ParseError) as err:
            expr.parse("2**t")
        assert err.value.offset == 2

    def test_unknown_name(self):
        with pytest.raises(expr.ParseError):
            expr.parse("2*y+1")

    def test_unknown_function(self):
        with pytest.raises(expr.ParseError):
            expr.parse("tan(t)")

    def test_dangling_operator(self):
        with pytest.raises(expr.ParseError):
            expr.parse("1+")

    def test_unbalanced_paren(self):
        with pytest.raises(expr.ParseError):
            expr.parse("(1+2")

    def test_bad_character(self):
        with pytest.raises(expr.ParseError) as err:
            expr.parse("1 @ 2")
        assert err.value.offset == 2

    def test_comparison_outside_if(self):
        with pytest.raises(expr.ParseError):
            expr.parse("t < 1")

    def test_comparison_inside_if_arm(self):
        with pytest.raises(expr.ParseError):
            expr.parse("if(t<1, t<2, 0)")

    def test_if_arity(self):
        with pytest.raises(expr.ParseError):
            expr.parse("if(1, 2)")

    def test_offsets_inside_source(self):
        for src in ("2**t", "1 @ 2", "1+", "(1+2"):
            with pytest.raises(expr.ParseError) as err:
                expr.parse(src)
            assert 0 <= err.value.offset <= len(src)


class TestEvaluate:
    def test_sgn(self):
        assert ev("sgn(-3.5)") == -1.0
        assert ev("sgn(0)") == 0.0
        assert ev("sgn(2)") == 1.0

    def test_exp_kernel_shape(self):
        assert ev("exp(-t/x)/x", x=2, t=0) == 0.5

    def test_log_domain_error(self):
        with pytest.raises(expr.EvalError):
            ev("log(t)", t=0)

    def test_sqrt_domain_error(self):
        with pytest.raises(expr.EvalError):
            ev("sqrt(-1)")

    def test_division_by_zero(self):
        with pytest.raises(expr.EvalError):
            ev("1/t", t=0)

    def test_unbound_variable(self):
        with pytest.raises(expr.EvalError):
            expr.evaluate(expr.parse("t+1"), {})

    def test_named_functions(self):
        assert ev("sin(0)") == 0.0
        assert ev("cos(0)") == 1.0
        assert ev("abs(-2)") == 2.0
        assert ev("floor(2.9)") == 2.0
        assert ev("sqrt(9)") == 3.0
        assert ev("log(exp(1))") == 1.0

    def test_fractional_power_of_negative_base(self):
        with pytest.raises(expr.EvalError):
            ev("(0-2)^0.5")


class TestFreeVars:
    def test_t_only(self):
        assert expr.free_vars(expr.parse("2*t+1")) == {"t"}

    def test_t_and_x(self):
        assert expr.free_vars(expr.parse("if(t<=x,1,0)")) == {"t", "x"}

    def test_constant(self):
        assert expr.free_vars(expr.parse("3.5")) == set()


class TestCompile:
    def test_matches_evaluate(self):
        for src, binds in [
            ("2*t+1", {"t": 3.0}),
            ("if(t<=x, 1/(x+1), 0)", {"t": 2.0, "x": 4.0}),
            ("exp(-t/x)/x", {"t": 1.0, "x": 2.0}),
            ("-t^2 + sgn(t)", {"t": 1.5}),
        ]:
            node = expr.parse(src)
            fn = expr.compile_fn(node, ("t", "x") if "x" in binds else ("t",))
            args = (binds["t"], binds["x"]) if "x" in binds else (binds["t"],)
            assert fn(*args) == expr.evaluate(node, binds)

    def test_rejects_unbound(self):
        with pytest.raises(expr.EvalError):
            expr.compile_fn(expr.parse("x+1"), ("t",))


class TestRender:
    CASES = [
        "2*t+1",
        "if(t<=x, 1/(x+1), 0)",
        "-2^2",
        "2^3^2",
        "1 - 2 - 3",
        "12/3/2",
        "max(t, 0) * min(x, 1)",
        "exp(-t/x)/x",
        "-(t+1)",
        "sgn(-3.5)",
    ]

    @pytest.mark.parametrize("src", CASES)
    def test_round_trip_fixed_point(self, src):
        first = expr.parse(src)
        rendered = expr.render(first)
        again = expr.parse(rendered)
        assert again == first
        assert expr.render(again) == rendered


def _leaf() -> st.SearchStrategy:
    return st.one_of(
        st.builds(expr.Num, st.floats(min_value=0.0, max_value=100.0, allow_nan=False)),
        st.sampled_from([expr.Var("t"), expr.Var("x")]),
    )


def _tree() -> st.SearchStrategy:
    return st.recursive(
        _leaf(),
        lambda inner: st.one_of(
            st.builds(expr.Neg, inner),
            st.builds(expr.Bin, st.sampled_from(["+", "-", "*", "/", "^"]), inner, inner),
            st.builds(lambda a: expr.Call("abs", (a,)), inner),
            st.builds(lambda c, a, b: expr.If(expr.Cmp("<=", c, a), a, b), inner, inner, inner),
        ),
        max_leaves=12,
    )


@given(_tree())
def test_render_parse_round_trip(node):
    assert expr.parse(expr.render(node)) == node


@given(st.floats(min_value=-50, max_value=50, allow_nan=False), st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_eval_deterministic(t, x):
    node = expr.parse("if(t<=x, t*x - 2, exp(min(t, 1)))")
    a = expr.evaluate(node, {"t": t, "x": x})
    b = expr.evaluate(node, {"t": t, "x": x})
    assert a == b and not math.isnan(a)
