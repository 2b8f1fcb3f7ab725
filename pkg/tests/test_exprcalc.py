import numpy as np
import pytest

from fkdv.exprcalc import (
    DomainError,
    ParseError,
    Pow,
    SmoothFn,
    Var,
    chebyshev_nodes,
    diff,
    eval_expr,
    parse,
    to_text,
)

EXPRESSIONS = [
    "t^2",
    "exp(t)",
    "1/t",
    "(t^2+1)^(3/2)*exp(5*0.3*atan(t))",
    "sin(t)*cos(2*t)",
    "sqrt(t+1)",
    "abs(t-2)",
    "t^-1",
    "2*pi*t - e",
    "exp(-t)*(2-exp(-t))^3",
    "-t^2+3",
]


def central_fd(expr, t, h=1e-5):
    return (eval_expr(expr, t + h) - eval_expr(expr, t - h)) / (2 * h)


class TestParse:
    def test_power_ast(self):
        e = parse("t^2")
        assert isinstance(e, Pow) and isinstance(e.base, Var) and e.exponent == 2.0

    def test_table_style_expression(self):
        e = parse("(t^2+1)^(3/2)*exp(5*atan(t))")
        assert eval_expr(e, 0.0) == pytest.approx(1.0)

    def test_double_caret_is_error_with_position(self):
        with pytest.raises(ParseError) as err:
            parse("t^^2")
        assert err.value.position == 2

    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse("   ")

    def test_unknown_identifier(self):
        with pytest.raises(ParseError) as err:
            parse("t + x")
        assert "x" in str(err.value)

    def test_nonconstant_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse("t^t")

    def test_right_associative_power(self):
        # 2^3^2 = 2^9 = 512
        assert eval_expr(parse("2^3^2"), 0.0) == pytest.approx(512.0)

    def test_constants_and_aliases(self):
        assert eval_expr(parse("cos(pi)"), 0.0) == pytest.approx(-1.0)
        assert eval_expr(parse("ln(e)"), 0.0) == pytest.approx(1.0)
        assert eval_expr(parse("arctan(1)"), 0.0) == pytest.approx(np.pi / 4)

    @pytest.mark.parametrize("text", EXPRESSIONS)
    def test_roundtrip(self, text):
        e = parse(text)
        e2 = parse(to_text(e))
        ts = np.linspace(0.6, 4.5, 40)
        np.testing.assert_allclose(eval_expr(e, ts), eval_expr(e2, ts), rtol=1e-14)

    def test_negative_base_noninteger_power_is_domain_error(self):
        e = parse("t^0.5")
        with pytest.raises(DomainError):
            eval_expr(e, -2.0)
        # integer powers of negative bases are fine
        assert eval_expr(parse("t^3"), -2.0) == pytest.approx(-8.0)


class TestDiff:
    def test_power_rule(self):
        d = diff(parse("t^2"))
        assert eval_expr(d, 3.0) == pytest.approx(6.0)

    def test_exp_fixed_point(self):
        d = diff(parse("exp(t)"))
        ts = np.linspace(0.5, 3.0, 7)
        np.testing.assert_allclose(eval_expr(d, ts), np.exp(ts), rtol=1e-14)

    def test_three_halves_power(self):
        d = diff(parse("(t^2+1)^(3/2)"))
        assert eval_expr(d, 1.0) == pytest.approx(3.0 * np.sqrt(2.0), rel=1e-12)

    def test_abs_derivative_at_zero(self):
        d = diff(parse("abs(t)"))
        assert eval_expr(d, 0.0) == 0.0
        assert eval_expr(d, -1.5) == -1.0

    @pytest.mark.parametrize("text", EXPRESSIONS)
    def test_matches_central_differences(self, text):
        e = parse(text)
        d = diff(e)
        rng = np.random.default_rng(42)
        for t in rng.uniform(0.55, 4.95, size=100):
            if "abs" in text and abs(t - 2.0) < 1e-3:
                continue  # kink
            exact = eval_expr(d, float(t))
            approx = central_fd(e, float(t))
            assert abs(exact - approx) <= 1e-6 * (1.0 + abs(exact))


class TestSmoothFn:
    def test_zero_integrand(self):
        f = SmoothFn.from_text("0", interval=(0.0, 4.0))
        assert f.antiderivative(3.0) == pytest.approx(0.0, abs=1e-14)

    def test_exponential_integral(self):
        f = SmoothFn.from_text("exp(-t)", interval=(0.0, 2.0), t_ref=0.0)
        assert f.antiderivative(1.0) == pytest.approx(1.0 - np.exp(-1.0), abs=1e-11)

    def test_log_integral(self):
        f = SmoothFn.from_text("1/t", interval=(1.0, np.e), t_ref=1.0)
        assert f.antiderivative(np.e) == pytest.approx(1.0, abs=1e-11)

    def test_anchor_is_zero(self):
        f = SmoothFn.from_text("sin(t)", interval=(0.5, 5.0), t_ref=1.25)
        assert f.antiderivative(1.25) == 0.0

    def test_additivity_over_adjacent_intervals(self):
        f = SmoothFn.from_text("exp(t)*sin(3*t)", interval=(0.5, 5.0))
        a, b, c = 0.7, 2.3, 4.9
        whole = f.antiderivative(c) - f.antiderivative(a)
        parts = (f.antiderivative(b) - f.antiderivative(a)) + (
            f.antiderivative(c) - f.antiderivative(b))
        assert whole == pytest.approx(parts, abs=1e-10)

    def test_cache_refinement_stable(self):
        f = SmoothFn.from_text("cos(t)^2", interval=(0.5, 5.0), t_ref=0.5)
        coarse = f.antiderivative(4.8)
        for t in np.linspace(0.6, 4.7, 57):
            f.antiderivative(float(t))
        again = f.antiderivative(4.8)
        assert again == coarse  # cached values are never recomputed
        fresh = SmoothFn.from_text("cos(t)^2", interval=(0.5, 5.0), t_ref=0.5)
        for t in np.linspace(0.5, 4.8, 113):
            fresh.antiderivative(float(t))
        assert fresh.antiderivative(4.8) == pytest.approx(coarse, abs=1e-10)

    def test_derivative_of_antiderivative(self):
        f = SmoothFn.from_text("exp(-t^2)", interval=(0.5, 3.0))
        F = f.antiderivative_fn()
        for t in [0.8, 1.7, 2.6]:
            h = 1e-6
            fd = (F(t + h) - F(t - h)) / (2 * h)
            assert fd == pytest.approx(f(t), abs=1e-8)
            assert F.deriv(t) == pytest.approx(f(t), rel=1e-13)

    def test_out_of_range(self):
        f = SmoothFn.from_text("t", interval=(0.5, 5.0))
        with pytest.raises(ValueError):
            f.antiderivative(10.0)

    def test_inverse(self):
        f = SmoothFn.from_text("ln(t)", interval=(1.0, 5.0), t_ref=1.0)
        g = f.inverse()
        for y in [0.1, 0.9, 1.5]:
            assert f(g(y)) == pytest.approx(y, abs=1e-12)
        assert g.deriv(1.0) == pytest.approx(np.e, rel=1e-9)

    def test_inverse_rejects_nonmonotone(self):
        f = SmoothFn.from_text("sin(t)", interval=(0.5, 5.0))
        with pytest.raises(ValueError):
            f.inverse()

    def test_callable_backed_finite_differences(self):
        f = SmoothFn(lambda t: np.tanh(t), interval=(0.5, 3.0), name="tanh")
        for t in [0.7, 1.4, 2.9]:
            assert f.deriv(t) == pytest.approx(1.0 / np.cosh(t) ** 2, rel=1e-8)

    def test_vector_evaluation(self):
        f = SmoothFn.from_text("t^2+1", interval=(0.5, 5.0))
        ts = np.linspace(1, 2, 5)
        np.testing.assert_allclose(f(ts), ts**2 + 1)


def test_chebyshev_nodes_inside_interval():
    ts = chebyshev_nodes(0.5, 5.0, 64)
    assert ts.shape == (64,)
    assert np.all(ts > 0.5) and np.all(ts < 5.0)
    assert np.all(np.diff(ts) > 0)
