import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpfree import bounds
from gpfree.errors import DomainError

mp.mp.dps = 40

REL = 1e-12


def mp_C(i, j):
    return mp.log(2) * (mp.mpf(1) / i + mp.mpf(1) / j)


class TestConstants:
    def test_scale_is_exact_rational(self):
        assert bounds.C_ij_scale(2, 3) == Fraction(5, 6)
        assert bounds.C_ij_scale(1, 1) == Fraction(2, 1)

    def test_C_11(self):
        assert bounds.C_ij(1, 1) == pytest.approx(2 * math.log(2), rel=REL)

    def test_C_23_headline_value(self):
        assert bounds.C_ij(2, 3) == pytest.approx(0.5776226504666211, rel=REL)

    @given(i=st.integers(1, 9), j=st.integers(1, 9))
    def test_matches_high_precision(self, i, j):
        assert bounds.C_ij(i, j) == pytest.approx(float(mp_C(i, j)), rel=REL)

    def test_bad_exponents(self):
        with pytest.raises(DomainError):
            bounds.C_ij(0, 3)


class TestHShort:
    def test_rejects_below_min_x(self):
        with pytest.raises(DomainError):
            bounds.h_short(15.15, 2, 3, 0.1)

    def test_value_at_16(self):
        want = float(mp.e ** ((mp_C(2, 3) + mp.mpf("0.2"))
                              * mp.log(16) / mp.log(mp.log(16))))
        got = bounds.h_short(16, 2, 3, 0.1)
        assert got == pytest.approx(want, rel=REL)
        assert got == pytest.approx(8.28, abs=0.01)

    def test_eventually_below_sqrt_x(self):
        # h_short(x) < sqrt(x) iff log log x > 2*(C_{2,3} + 2*eps); the
        # crossover is x ~ 28 for eps = 0.01 and x ~ 1e76 for eps = 1.
        x = 100.0
        while x < 1e15:
            assert bounds.h_short(x, 2, 3, 0.01) < math.sqrt(x)
            x *= 3.7
        x = 1e76
        while x < 1e300:
            assert bounds.h_short(x, 2, 3, 1.0) < math.sqrt(x)
            x *= 1e10

    def test_monotone_in_epsilon(self):
        vals = [bounds.h_short(1e4, 2, 3, e / 10) for e in range(1, 11)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestGapEnvelope:
    def test_value_at_1e6(self):
        got = bounds.gap_envelope(1e6, 0.1, 1.0)
        want = float(mp.e ** ((mp_C(2, 3) + mp.mpf("0.1"))
                              * mp.log(1e6) / mp.log(mp.log(1e6))))
        assert got == pytest.approx(want, rel=REL)
        assert got == pytest.approx(35.3, abs=0.2)

    def test_linear_in_c_eps(self):
        base = bounds.gap_envelope(1e5, 0.3, 1.0)
        assert bounds.gap_envelope(1e5, 0.3, 7.25) == pytest.approx(7.25 * base, rel=REL)

    def test_strictly_increasing_in_x(self):
        xs = [16.0 * 1.5**p for p in range(60)]
        vals = [bounds.gap_envelope(x, 0.2, 1.0) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_guards(self):
        with pytest.raises(DomainError):
            bounds.gap_envelope(10, 0.1, 1.0)
        with pytest.raises(DomainError):
            bounds.gap_envelope(100, -0.1, 1.0)
        with pytest.raises(DomainError):
            bounds.gap_envelope(100, 0.1, 0.0)


class TestSurvivalBound:
    def test_value_at_1e4(self):
        got = bounds.survival_bound(1e4, 1.0, 1.0, 0.1)
        want = float(mp.e ** (-(mp.e ** ((mp_C(2, 3) + mp.mpf("0.1"))
                                         * mp.log(1e4) / mp.log(mp.log(1e4))))))
        assert got == pytest.approx(want, rel=REL)
        assert got == pytest.approx(6.0e-8, rel=0.05)

    @given(
        x=st.floats(16, 1e8),
        C=st.floats(0.1, 3),
        E=st.floats(0.1, 3),
        eps=st.floats(0.01, 1),
    )
    @settings(max_examples=100)
    def test_monotone_decreasing_in_each(self, x, C, E, eps):
        v = bounds.survival_bound(x, C, E, eps)
        assert bounds.survival_bound(x * 1.5, C, E, eps) <= v
        assert bounds.survival_bound(x, C * 1.5, E, eps) <= v
        assert bounds.survival_bound(x, C, E * 1.5, eps) <= v


class TestPDefault:
    def test_at_two(self):
        assert bounds.p_default(2) == pytest.approx(1 - 1 / math.log(4), rel=REL)

    def test_at_1e6(self):
        assert bounds.p_default(10**6) == pytest.approx(0.9276, abs=5e-4)

    def test_tends_to_one(self):
        vals = [bounds.p_default(10**e) for e in range(1, 10)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0.95

    def test_guard(self):
        with pytest.raises(DomainError):
            bounds.p_default(1)
