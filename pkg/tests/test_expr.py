import math

import pytest
from hypothesis import given, settings

from expr_strategies import exprs
from opchain.errors import DomainError, UnboundVariable
from opchain.numtower import BOTTOM, JoinComplex, NEG_INF, cx_close, jc, real_close
from opchain.expr import (
    Add,
    Apply,
    Const,
    DerivN,
    Join,
    Mul,
    Neg,
    ParseError,
    Pow,
    Sub,
    Var,
    eval_expr,
    free_vars,
    parse,
    print_expr,
)


class TestPrecedence:
    def test_decluttered_polynomial_form(self):
        got = parse("a+n*z \\/ b+z")
        want = Join(Add(Var("a"), Mul(Var("n"), Var("z"))), Add(Var("b"), Var("z")))
        assert got == want

    def test_polynomial_head(self):
        got = parse("a + n*z \\/ b")
        assert got == Join(Add(Var("a"), Mul(Var("n"), Var("z"))), Var("b"))

    def test_join_binds_loosest(self):
        assert parse("1 + 2 \\/ 3 * 4") == Join(
            Add(Const(jc(1.0)), Const(jc(2.0))), Mul(Const(jc(3.0)), Const(jc(4.0)))
        )

    def test_power_is_right_associative(self):
        v = eval_expr(parse("2^3^2"), mode="real")
        assert v == 512.0

    def test_unary_minus_binds_tighter_than_power(self):
        # -z^2 reads as (-z)^2
        assert parse("-z^2") == Pow(Neg(Var("z")), Const(jc(2.0)))

    def test_parentheses_override(self):
        assert parse("(1 + 2) * 3") == Mul(
            Add(Const(jc(1.0)), Const(jc(2.0))), Const(jc(3.0))
        )

    def test_subtraction_left_associative(self):
        assert eval_expr(parse("10 - 3 - 2"), mode="real") == 5.0


class TestLiterals:
    def test_bottom_literal(self):
        assert parse("x \\/ -inf") == Join(Var("x"), Const(BOTTOM))

    def test_imaginary_unit(self):
        assert parse("i") == Const(JoinComplex(0.0, 1.0))

    def test_euler_and_pi(self):
        assert parse("e") == Const(JoinComplex(math.e, 0.0))
        assert parse("pi") == Const(JoinComplex(math.pi, 0.0))

    def test_bare_inf_rejected(self):
        with pytest.raises(ParseError):
            parse("inf")

    def test_scientific_notation(self):
        assert parse("2.5e-3") == Const(JoinComplex(0.0025, 0.0))

    def test_exponent_backtracks_to_name(self):
        # "2*e" must lex as number then the constant e
        assert parse("2*e") == Mul(Const(jc(2.0)), Const(JoinComplex(math.e, 0.0)))

    def test_join_aliases(self):
        want = parse("1 \\/ 2")
        assert parse("1 v 2") == want
        assert parse("1 ∨ 2") == want


class TestExplicitForms:
    def test_derivative_operator(self):
        assert parse("D[-1](z^2)") == DerivN(-1, Pow(Var("z"), Const(jc(2.0))))

    def test_oplus_form_evaluates(self):
        v = eval_expr(parse("oplus[2](e^2, e^3)"), mode="real")
        assert real_close(v, math.exp(6.0))

    def test_inverse_form(self):
        v = eval_expr(parse("inv[0](5)"), mode="real")
        assert v == -5.0

    def test_fractional_level_rejected(self):
        with pytest.raises(ParseError):
            parse("oplus[1.5](1, 2)")


class TestParseErrors:
    def test_implicit_multiplication_rejected(self):
        with pytest.raises(ParseError):
            parse("2z")

    def test_dangling_operator(self):
        with pytest.raises(ParseError) as e:
            parse("1 +")
        assert e.value.position <= len("1 +")

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse("(1 + 2")

    def test_error_carries_position_and_expectation(self):
        with pytest.raises(ParseError) as e:
            parse("1 + $")
        assert e.value.position == 4
        assert e.value.expected


class TestEvaluation:
    def test_join_of_zeros(self):
        v = eval_expr(parse("0 \\/ 0"))
        assert cx_close(v, jc(math.log(2.0)), 1e-15, 1e-15)

    def test_derivative_of_exp_at_complex_point(self):
        import cmath

        v = eval_expr(parse("D[-1](exp(z))"), {"z": jc(1 + 1j)})
        assert cx_close(v, jc(cmath.exp(1 + 1j)), 1e-9, 1e-9)

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            eval_expr(parse("q + 1"))

    def test_real_mode_returns_floats(self):
        assert eval_expr(parse("1 + 2"), mode="real") == 3.0
        assert eval_expr(parse("-inf"), mode="real") == NEG_INF

    def test_real_mode_rejects_complex_results(self):
        with pytest.raises(DomainError):
            eval_expr(parse("i"), mode="real")
        with pytest.raises(DomainError):
            eval_expr(parse("log(0 - 1)"), mode="real")

    def test_complex_mode_log_of_negative(self):
        v = eval_expr(parse("log(0 - 1)"))
        assert cx_close(v, JoinComplex(0.0, math.pi), 1e-12, 1e-12)

    def test_bottom_absorbs_addition(self):
        assert eval_expr(parse("-inf + 5")) == BOTTOM

    def test_bottom_in_multiplication_is_error(self):
        with pytest.raises(DomainError):
            eval_expr(parse("-inf * 5"))

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            eval_expr(parse("1 / 0"))

    def test_deterministic(self):
        e = parse("exp(z) \\/ z^2")
        env = {"z": jc(0.3 + 0.2j)}
        assert eval_expr(e, env) == eval_expr(e, env)

    def test_free_vars(self):
        assert free_vars(parse("a + n*z \\/ b")) == {"a", "n", "z", "b"}


class TestPrinter:
    def test_precedence_drops_parens(self):
        e = Join(Add(Var("a"), Var("z")), Var("b"))
        assert print_expr(e) == "a + z \\/ b"

    def test_power(self):
        assert print_expr(Pow(Var("z"), Const(jc(2.0)))) == "z^2"

    def test_join_of_negation(self):
        assert print_expr(Join(Var("z"), Neg(Var("z")))) == "z \\/ -z"

    def test_needed_parens_kept(self):
        e = Mul(Add(Var("a"), Var("b")), Var("c"))
        assert print_expr(e) == "(a + b) * c"

    def test_sub_right_assoc_parens(self):
        e = Sub(Var("a"), Sub(Var("b"), Var("c")))
        assert print_expr(e) == "a - (b - c)"

    @given(exprs)
    @settings(max_examples=300, deadline=None)
    def test_round_trip(self, e):
        assert parse(print_expr(e)) == e
