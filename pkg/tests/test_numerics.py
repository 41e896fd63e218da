import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrafrac.errors import DivergentSeriesError, ExactnessLost
from ultrafrac.field import FieldParams
from ultrafrac.numerics import (
    ComplexValue,
    ExactScalar,
    NumericValue,
    geometric_tail,
    q_power,
    weighted_geometric_tail,
)


class TestExactScalar:
    def test_log_products_cancel_to_rationals(self, fp2):
        inv = ExactScalar.inv_ln_q(fp2, Fraction(2, 3))
        ln = ExactScalar.ln_q(fp2, Fraction(3, 5))
        assert (inv * ln) == ExactScalar.rational(Fraction(2, 5))

    def test_square_of_log_escapes_ring(self, fp2):
        ln = ExactScalar.ln_q(fp2)
        with pytest.raises(ExactnessLost):
            ln * ln

    def test_mixed_bases_escape(self, fp2, fp3):
        with pytest.raises(ExactnessLost):
            ExactScalar.ln_q(fp2) + ExactScalar.ln_q(fp3)

    def test_evaluate(self, fp2):
        es = ExactScalar(Fraction(1), Fraction(2), Fraction(0), 2)
        assert es.evaluate() == pytest.approx(1 + 2 * math.log(2), rel=1e-15)


class TestNumericValue:
    def test_demotion_is_recorded(self):
        a = NumericValue.from_rational(Fraction(1, 3))
        b = NumericValue.from_float(0.5)
        assert a.is_exact and not b.is_exact
        assert not (a + b).is_exact
        assert (a + a).is_exact

    def test_ring_escape_demotes_product(self, fp2):
        ln = NumericValue.from_exact(ExactScalar.ln_q(fp2))
        out = ln * ln
        assert not out.is_exact
        assert float(out) == pytest.approx(math.log(2) ** 2, rel=1e-15)


class TestQPower:
    def test_perfect_root_is_exact(self):
        v = q_power(FieldParams(2, 2), Fraction(1, 2), 3)
        assert v.is_exact and v.exact.a == 8

    def test_irrational_is_float(self, fp2):
        v = q_power(fp2, Fraction(1, 2), 1)
        assert not v.is_exact
        assert float(v) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_negative_exponent(self, fp3):
        v = q_power(fp3, 2, -1)
        assert v.is_exact and v.exact.a == Fraction(1, 9)

    @given(
        q=st.sampled_from([2, 3, 5]),
        num=st.integers(-6, 6),
        den=st.integers(1, 4),
        k=st.integers(-4, 4),
    )
    @settings(max_examples=150, deadline=None)
    def test_exact_and_float_paths_agree(self, q, num, den, k):
        fp = FieldParams(q)
        v = q_power(fp, Fraction(num, den), k)
        direct = float(q) ** (float(Fraction(num, den)) * k)
        assert float(v) == pytest.approx(direct, rel=1e-12)


class TestGeometricTails:
    def test_frozen_values(self, fp2, fp3):
        assert geometric_tail(fp2, 1, 0).exact.a == 2
        assert geometric_tail(fp2, 1, 1).exact.a == 1
        assert geometric_tail(fp3, 2, 0).exact.a == Fraction(9, 8)
        assert weighted_geometric_tail(fp2, 1, 1).exact.a == 2
        assert weighted_geometric_tail(fp3, 1, 1).exact.a == Fraction(3, 4)
        assert weighted_geometric_tail(fp2, 1, 0).exact.a == 2

    @pytest.mark.parametrize("q,s,j0", [(2, 1, 0), (2, 1, 1), (3, 2, 0), (5, 1, -2), (3, 1, 3)])
    def test_against_partial_sums(self, q, s, j0):
        fp = FieldParams(q)
        partial = sum(Fraction(q) ** (-s * j) for j in range(j0, j0 + 90))
        wpartial = sum(j * Fraction(q) ** (-s * j) for j in range(j0, j0 + 90))
        assert float(geometric_tail(fp, s, j0)) == pytest.approx(float(partial), rel=1e-12)
        assert float(weighted_geometric_tail(fp, s, j0)) == pytest.approx(float(wpartial), rel=1e-12)

    @given(s=st.integers(1, 4), j0=st.integers(-3, 6))
    @settings(max_examples=60, deadline=None)
    def test_peel_one_term_recurrence(self, s, j0):
        fp = FieldParams(2)
        lhs = geometric_tail(fp, s, j0).exact.a
        rhs = Fraction(2) ** (-s * j0) + geometric_tail(fp, s, j0 + 1).exact.a
        assert lhs == rhs

    def test_divergent_rejected(self, fp2):
        with pytest.raises(DivergentSeriesError):
            geometric_tail(fp2, 0, 0)
        with pytest.raises(DivergentSeriesError):
            weighted_geometric_tail(fp2, -1, 0)


class TestComplexValue:
    def test_arithmetic_and_exactness(self):
        a = ComplexValue.from_rational(Fraction(1, 2), Fraction(1, 3))
        b = ComplexValue.from_rational(Fraction(2), Fraction(-1))
        prod = a * b
        assert prod.is_exact
        assert prod.to_complex() == pytest.approx((0.5 + 1j / 3) * (2 - 1j))
        assert (a - a).is_exact_zero()

    def test_mixing_with_float_demotes(self):
        a = ComplexValue.from_rational(1, 0)
        z = a + ComplexValue.from_complex(0.25 + 0j)
        assert not z.is_exact
        assert z.to_complex() == 1.25
