import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from opchain.errors import DomainError, Unsupported
from opchain.numtower import (
    BOTTOM,
    BranchPolicy,
    JoinComplex,
    cx_close,
    jc,
    real_close,
)
from opchain.levels import join
from opchain.expr import parse, eval_expr
from opchain.calculus import (
    classic_derivative,
    join_of_partials,
    join_partials,
    n_derivative,
    n_derivative_closed,
    n_derivative_limit,
    repeat_vee_derivative,
    vee_derivative,
)

MOD2PI = BranchPolicy.MOD_2PI


def close_mod2pi(a, b, rel=1e-9, abs_tol=1e-9):
    return cx_close(a, jc(b), rel, abs_tol, MOD2PI)


class TestClassicDerivative:
    def test_power_rule(self):
        d = classic_derivative(parse("z^2"))
        assert eval_expr(d, {"z": jc(3.0)}) == jc(6.0)

    def test_join_of_variable_with_itself(self):
        d = classic_derivative(parse("x \\/ x"), "x")
        assert real_close(eval_expr(d, {"x": 0.37}, "real"), 1.0, 1e-12)

    def test_join_derivative_is_tanh(self):
        d = classic_derivative(parse("x \\/ -x"), "x")
        got = eval_expr(d, {"x": 1.0}, "real")
        assert real_close(got, math.tanh(1.0), 1e-12)

    def test_quotient_rule(self):
        d = classic_derivative(parse("z / (1 + z)"))
        got = eval_expr(d, {"z": jc(2.0)})
        assert cx_close(got, jc(1.0 / 9.0), 1e-12, 1e-12)

    def test_general_power(self):
        d = classic_derivative(parse("z^z"))
        got = eval_expr(d, {"z": jc(2.0)})
        assert cx_close(got, jc(4.0 * (math.log(2.0) + 1.0)), 1e-12, 1e-12)

    def test_trig_and_hyperbolic(self):
        d = classic_derivative(parse("sin(z) + cosh(z)"))
        got = eval_expr(d, {"z": jc(0.5)})
        want = math.cos(0.5) + math.sinh(0.5)
        assert cx_close(got, jc(want), 1e-12, 1e-12)


class TestVeeDerivativeClosedValues:
    def test_constant_gives_bottom(self):
        assert vee_derivative(parse("3 + 0*z"), jc(1.0)) == BOTTOM
        assert vee_derivative(parse("pi + 0*z"), jc(0.5 + 0.5j)) == BOTTOM

    def test_identity_function_gives_zero(self):
        for zv in (0.5, 1 + 1j, -2 + 0.3j):
            assert close_mod2pi(vee_derivative(parse("z"), jc(zv)), 0.0)

    def test_shift_gives_the_shift(self):
        a = 0.7 - 0.4j
        f = parse("(0.7 - 0.4*i) + z")
        for zv in (0.5, 1 + 1j):
            assert close_mod2pi(vee_derivative(f, jc(zv)), a)

    def test_exp_is_invariant(self):
        for zv in (0.5, 1 + 1j, 2.0):
            got = vee_derivative(parse("exp(z)"), jc(zv))
            assert close_mod2pi(got, cmath.exp(zv))

    def test_log_gives_negation(self):
        for zv in (0.5, 1 + 1j, 2.0):
            assert close_mod2pi(vee_derivative(parse("log(z)"), jc(zv)), -zv)

    def test_square_at_one_gives_ln_two(self):
        got = vee_derivative(parse("z^2"), jc(1.0))
        assert close_mod2pi(got, math.log(2.0))

    def test_power_rule_formula(self):
        z = 1.3 + 0.4j
        for n in range(1, 9):
            got = vee_derivative(parse(f"z^{n}"), jc(z))
            want = z**n - z + (n - 1) * cmath.log(z) + math.log(n)
            assert close_mod2pi(got, want)

    def test_scaled_exponential(self):
        a, b = 0.8, 1.3
        f = parse("0.8 * exp(1.3 * z)")
        z = 0.4 + 0.2j
        want = a * cmath.exp(b * z) + (b - 1) * z + cmath.log(a * b)
        assert close_mod2pi(vee_derivative(f, jc(z)), want)


class TestVeeDerivativeRules:
    @given(st.floats(0.3, 1.8), st.floats(-1.0, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_sum_of_joins_rule(self, re, im):
        z = JoinComplex(re, im)
        f, g = parse("z^2"), parse("exp(z)")
        got = vee_derivative(parse("z^2 \\/ exp(z)"), z)
        from opchain.levels import cx_join

        want = cx_join(vee_derivative(f, z), vee_derivative(g, z))
        assert cx_close(got, want, 1e-9, 1e-9, MOD2PI)

    @given(st.floats(0.3, 1.8), st.floats(-1.0, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_product_analogue(self, re, im):
        z = JoinComplex(re, im)
        f, g = parse("z^3"), parse("exp(z)")
        got = vee_derivative(parse("z^3 + exp(z)"), z)
        from opchain.levels import cx_join, cx_oplus

        fz, gz = eval_expr(f, {"z": z}), eval_expr(g, {"z": z})
        want = cx_join(
            cx_oplus(0, fz, vee_derivative(g, z)),
            cx_oplus(0, vee_derivative(f, z), gz),
        )
        assert cx_close(got, want, 1e-9, 1e-9, MOD2PI)

    def test_nfold_rule(self):
        # D(n_v f) = n_v D(f) with n_v as the additive shift ln n
        z = jc(0.7 + 0.1j)
        for k in (2, 5):
            got = vee_derivative(parse(f"log({k}) + z^2"), z)
            want_base = vee_derivative(parse("z^2"), z)
            want = JoinComplex(want_base.re + math.log(k), want_base.im)
            assert cx_close(got, want, 1e-9, 1e-9, MOD2PI)

    def test_iterated_factorial(self):
        for n in range(1, 7):
            got = repeat_vee_derivative(n, parse(f"{n} * z"), jc(0.3))
            assert close_mod2pi(got, math.log(math.factorial(n)))

    def test_single_application_matches_linear_rule(self):
        n, z = 4, 0.9
        got = repeat_vee_derivative(1, parse("4 * z"), jc(z))
        assert close_mod2pi(got, (n - 1) * z + math.log(n))

    def test_repeated_exp_invariance(self):
        z = jc(0.6)
        got = repeat_vee_derivative(2, parse("exp(z)"), z)
        assert close_mod2pi(got, math.exp(0.6))


class TestNDerivativeClosed:
    def test_level_zero_is_classic(self):
        assert n_derivative_closed(0, parse("z^2"), jc(3.0)) == jc(6.0)

    def test_level_one_exp_invariant(self):
        z = 0.7 + 0.3j
        got = n_derivative_closed(1, parse("exp(z)"), jc(z))
        assert close_mod2pi(got, cmath.exp(z))

    def test_level_one_power_is_e_to_k(self):
        for k in (1, 2, 3, 5):
            got = n_derivative_closed(1, parse(f"z^{k}"), jc(1.7 + 0.2j))
            assert close_mod2pi(got, math.exp(k))

    def test_level_one_needs_nonzero_value(self):
        with pytest.raises(DomainError):
            n_derivative_closed(1, parse("z"), jc(0.0))

    def test_level_minus_one_matches_vee(self):
        z = jc(1.1 - 0.2j)
        f = parse("z^3")
        assert n_derivative_closed(-1, f, z) == vee_derivative(f, z)

    def test_level_minus_two_exp_invariant(self):
        z = jc(0.4 + 0.1j)
        got = n_derivative_closed(-2, parse("exp(z)"), z)
        assert close_mod2pi(got, cmath.exp(0.4 + 0.1j), 1e-9)

    def test_level_minus_two_of_identity_is_bottom(self):
        assert n_derivative_closed(-2, parse("z"), jc(0.4)) == BOTTOM

    def test_no_closed_form_above_level_one(self):
        with pytest.raises(Unsupported):
            n_derivative_closed(2, parse("z"), jc(1.0))


class TestNDerivativeLimit:
    def test_shift_at_join_level(self):
        a = 0.6 - 0.3j
        res = n_derivative_limit(-1, parse("(0.6 - 0.3*i) + z"), jc(1.2 + 0.5j))
        assert res.diagnostics.converged
        assert cx_close(res.value, jc(a), 1e-4, 1e-4, MOD2PI)

    def test_classic_derivative_recovered(self):
        res = n_derivative_limit(0, parse("z^2"), jc(2.0))
        assert res.diagnostics.converged
        assert cx_close(res.value, jc(4.0), 1e-4, 1e-4)

    def test_level_one_cube(self):
        res = n_derivative_limit(1, parse("z^3"), jc(1.5))
        assert res.diagnostics.converged
        assert cx_close(res.value, jc(math.exp(3.0)), 1e-4)

    def test_level_two_exp_probe(self):
        # No closed form exists at level 2; iterates should still settle
        # on exp within loose tolerance.
        z = 0.5 + 0.2j
        res = n_derivative_limit(2, parse("exp(z)"), jc(z))
        assert res.diagnostics.converged
        assert abs(res.value.z - cmath.exp(z)) / abs(cmath.exp(z)) < 1e-3

    def test_diagnostics_shape(self):
        res = n_derivative_limit(-1, parse("z^2"), jc(1.0))
        d = res.diagnostics
        assert res.method == "limit"
        assert len(d.h_schedule) == len(d.iterates) >= 2
        assert d.h_schedule == sorted(d.h_schedule, reverse=True)
        assert d.converged and d.final_delta < 1e-6
        blob = d.to_dict()
        assert set(blob) == {"h_schedule", "iterates", "converged", "final_delta"}

    def test_bottom_divergence_detected(self):
        # D_{-2}(z) is bottom; iterates dive below the floor
        res = n_derivative_limit(-2, parse("z"), jc(0.3 + 0.1j))
        assert res.diagnostics.converged
        assert res.value == BOTTOM

    def test_dispatcher_uses_closed_then_limit(self):
        assert n_derivative(0, parse("z^2"), jc(3.0)) == jc(6.0)
        got = n_derivative(2, parse("exp(z)"), jc(0.5))
        assert abs(got.z - math.exp(0.5)) < 1e-3


class TestJoinPartials:
    def test_symmetric_point(self):
        assert join_partials(0.0, 0.0) == (0.5, 0.5)
        px, py = join_partials(3.7, 3.7)
        assert px == py == 0.5

    def test_logistic_value(self):
        px, py = join_partials(2.0, 0.0)
        sigma2 = 1.0 / (1.0 + math.exp(-2.0))
        assert abs(px - sigma2) < 1e-15
        assert abs(py - (1.0 - sigma2)) < 1e-15

    @given(st.floats(-700, 700), st.floats(-700, 700))
    def test_pair_sums_to_one(self, x, y):
        px, py = join_partials(x, y)
        assert abs(px + py - 1.0) < 1e-12
        assert 0.0 <= px <= 1.0

    def test_extreme_gap_saturates(self):
        px, py = join_partials(1000.0, -1000.0)
        assert px == 1.0 and py == 0.0


class TestJoinOfPartials:
    def test_product_gives_the_join(self):
        got = join_of_partials(parse("x * y"), 1.3, -0.7)
        assert real_close(got, join(1.3, -0.7), 1e-10, 1e-10)

    def test_sum_gives_one_plus_ln_two(self):
        got = join_of_partials(parse("x + y"), 0.2, 1.9)
        assert real_close(got, 1.0 + math.log(2.0), 1e-10, 1e-10)

    def test_join_gives_join_of_softmax(self):
        x, y = 0.8, -0.3
        got = join_of_partials(parse("x \\/ y"), x, y)
        px, py = join_partials(x, y)
        assert real_close(got, join(px, py), 1e-10, 1e-10)


class TestHyperbolicFacts:
    @given(st.floats(-20, 20))
    def test_join_with_negation_is_log_two_cosh(self, x):
        want = math.log(2.0 * math.cosh(x))
        assert real_close(join(x, -x), want, 1e-12, 1e-12)
