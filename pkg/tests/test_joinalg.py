import math

import pytest
from hypothesis import given, strategies as st

from opchain.errors import DomainError
from opchain.numtower import BOTTOM, JoinComplex, cx_close, jc, real_close
from opchain.levels import join, nfold_join
from opchain.joinalg import JoinPolynomial, binomial_rhs, log_binomial, poly_eval

boxed = st.floats(allow_nan=False, allow_infinity=False, min_value=-3, max_value=3)


class TestLogBinomial:
    def test_four_choose_two(self):
        assert real_close(log_binomial(4, 2), math.log(6.0), 1e-12, 1e-12)

    def test_edge_is_zero(self):
        assert abs(log_binomial(17, 0)) < 1e-12
        assert abs(log_binomial(17, 17)) < 1e-12

    def test_ten_choose_five(self):
        assert real_close(log_binomial(10, 5), math.log(252.0), 1e-12, 1e-12)

    def test_matches_integer_binomials_up_to_sixty(self):
        for n in range(61):
            for k in range(n + 1):
                assert real_close(
                    log_binomial(n, k), math.log(math.comb(n, k)), 1e-12, 1e-12
                )

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            log_binomial(4, 5)
        with pytest.raises(DomainError):
            log_binomial(4, -1)
        with pytest.raises(DomainError):
            log_binomial(4.0, 2)


class TestBinomialIdentity:
    def test_unit_case_is_the_join(self):
        assert real_close(binomial_rhs(1, 0.7, -0.2), join(0.7, -0.2), 1e-12, 1e-12)

    def test_three_at_origin(self):
        # 3*(0 v 0) = 3 ln 2 = ln 8, also the fold of ln{1,3,3,1}
        assert real_close(binomial_rhs(3, 0.0, 0.0), math.log(8.0), 1e-12, 1e-12)

    @given(boxed, boxed)
    def test_square_expansion(self, x, y):
        # 2(x v y) = 2x v (ln 2 + x + y) v 2y
        want = join(2 * x, join(math.log(2.0) + x + y, 2 * y))
        assert real_close(binomial_rhs(2, x, y), want, 1e-12, 1e-12)

    @given(st.integers(min_value=1, max_value=20), boxed, boxed)
    def test_scales_the_join(self, n, x, y):
        assert real_close(binomial_rhs(n, x, y), n * join(x, y), 1e-9)

    def test_needs_positive_count(self):
        with pytest.raises(DomainError):
            binomial_rhs(0, 1.0, 2.0)


class TestScaledJoinIdentities:
    @given(st.integers(1, 15), st.integers(1, 15), boxed)
    def test_scalar_split(self, m, n, x):
        assert real_close(nfold_join(m * n, x), nfold_join(m, nfold_join(n, x)), 1e-12, 1e-12)

    @given(st.integers(1, 15), st.integers(1, 15), boxed, boxed)
    def test_sum_of_scaled_joins(self, m, n, x, y):
        lhs = nfold_join(m, x) + nfold_join(n, y)
        assert real_close(lhs, math.log(m * n) + x + y, 1e-12, 1e-12)

    @given(boxed, boxed)
    def test_recurrences(self, m, n):
        assert real_close(join(m, n), join(m - 1, n - 1) + 1.0, 1e-12, 1e-12)
        assert real_close(join(m, n) + 1.0, join(m + 1, n + 1), 1e-12, 1e-12)

    @given(st.integers(1, 15), boxed, boxed, boxed)
    def test_shift_absorption(self, n, x, y, z):
        assert real_close(nfold_join(n, x + y) + z, nfold_join(n, x + y + z), 1e-12, 1e-12)

    @given(boxed, boxed)
    def test_symmetric_identity(self, x, y):
        lhs = x + y + join(x, y)
        rhs = join(2 * x + y, x + 2 * y)
        assert real_close(lhs, rhs, 1e-12, 1e-12)


class TestJoinPolynomial:
    def test_constant_polynomial(self):
        p = JoinPolynomial((jc(2.5),))
        assert poly_eval(p, jc(41.0)) == jc(2.5)
        assert p.degree == 0

    def test_linear_monomial(self):
        p = JoinPolynomial((BOTTOM, jc(0.0)))
        z = JoinComplex(1.25, -0.5)
        assert cx_close(poly_eval(p, z), z, 1e-12, 1e-12)
        assert p.degree == 1

    def test_two_zero_coefficients_at_origin(self):
        p = JoinPolynomial((jc(0.0), jc(0.0)))
        got = poly_eval(p, jc(0.0))
        assert cx_close(got, jc(math.log(2.0)), 1e-12, 1e-12)

    def test_all_bottom_evaluates_to_bottom(self):
        p = JoinPolynomial((BOTTOM, BOTTOM))
        assert poly_eval(p, jc(1.0)) == BOTTOM
        assert p.degree == -1

    def test_bottom_argument_keeps_constant_term_only(self):
        p = JoinPolynomial((jc(3.0), jc(100.0)))
        assert poly_eval(p, BOTTOM) == jc(3.0)

    @given(boxed, boxed, boxed)
    def test_matches_direct_fold(self, a0, a1, x):
        p = JoinPolynomial((jc(a0), jc(a1)))
        want = join(a0, a1 + x)
        got = poly_eval(p, jc(x))
        assert cx_close(got, jc(want), 1e-10, 1e-10)
