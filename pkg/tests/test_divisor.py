import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpfree import divisor
from gpfree.errors import DomainError, ResourceLimit
from gpfree.limits import DEFAULT_LIMITS

from oracles import brute_d_ij, brute_d_k

LOG2 = math.log(2)


class TestFactorize:
    def test_72(self):
        assert divisor.factorize(72) == [(2, 3), (3, 2)]

    def test_one(self):
        assert divisor.factorize(1) == []

    def test_large_power_of_two(self):
        assert divisor.factorize(2**62) == [(2, 62)]

    @given(n=st.integers(1, 10**6))
    @settings(max_examples=200)
    def test_product_reconstructs(self, n):
        prod = 1
        for p, e in divisor.factorize(n):
            prod *= p**e
        assert prod == n


class TestPointwise:
    def test_d_k_of_one(self):
        for k in range(1, 8):
            assert divisor.d_k(1, k) == 1

    def test_d_2_of_12(self):
        assert divisor.d_k(12, 2) == 2

    def test_d_32_of_72(self):
        assert divisor.d_ij(72, 3, 2) == 6

    def test_d_22_of_36(self):
        assert divisor.d_ij(36, 2, 2) == 9

    def test_d_31_of_8(self):
        assert divisor.d_ij(8, 3, 1) == 5

    def test_primes_have_unit_pair_count(self):
        for p in [2, 3, 5, 7, 11, 97, 101]:
            assert divisor.d_ij(p, 2, 2) == 1
            assert divisor.d_ij(p, 3, 1) == 2

    @given(n=st.integers(1, 5000), k=st.integers(1, 5))
    @settings(max_examples=150)
    def test_d_k_matches_oracle(self, n, k):
        assert divisor.d_k(n, k) == brute_d_k(n, k)

    @given(n=st.integers(1, 5000), i=st.integers(1, 4), j=st.integers(1, 4))
    @settings(max_examples=150)
    def test_d_ij_matches_oracle(self, n, i, j):
        assert divisor.d_ij(n, i, j) == brute_d_ij(n, i, j)


class TestSieve:
    def test_d2_prefix(self):
        table = divisor.sieve(divisor.Interval(0, 12), divisor.DivisorSpec.single(2))
        assert [v for _, v in table.rows()] == [1, 1, 1, 2, 1, 1, 1, 2, 2, 1, 1, 2]

    def test_d1_single_cell(self):
        table = divisor.sieve(divisor.Interval(5, 1), divisor.DivisorSpec.single(1))
        assert [v for _, v in table.rows()] == [4]

    def test_segment_matches_pointwise_high(self):
        x, h = 10**6, 10**3
        table = divisor.sieve(divisor.Interval(x, h), divisor.DivisorSpec.pair(3, 2))
        for n, v in table.rows():
            assert v == divisor.d_ij(n, 3, 2)

    def test_window_budget(self):
        with pytest.raises(ResourceLimit):
            divisor.sieve(divisor.Interval(0, DEFAULT_LIMITS.sieve_max_len + 1),
                          divisor.DivisorSpec.single(2))

    @given(x=st.integers(0, 10**9), h=st.integers(1, 80),
           i=st.integers(1, 3), j=st.integers(1, 3))
    @settings(max_examples=40, deadline=None)
    def test_segment_matches_pointwise_random(self, x, h, i, j):
        table = divisor.sieve(divisor.Interval(x, h), divisor.DivisorSpec.pair(i, j))
        for n, v in table.rows():
            assert v == divisor.d_ij(n, i, j)


class TestSums:
    def test_small_exact(self):
        s = divisor.sum_S(divisor.Interval(0, 4), 2, 2, LOG2)
        assert s == pytest.approx(1.625, abs=1e-12)

    def test_mertens_at_ten(self):
        assert divisor.mertens_sum(10) == pytest.approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7)

    def test_mertens_small_x(self):
        assert divisor.mertens_sum(3) == pytest.approx(1.0 / 2 + 1.0 / 3)
        with pytest.raises(DomainError):
            divisor.mertens_sum(2 - 1)

    def test_mertens_budget(self):
        with pytest.raises(ResourceLimit):
            divisor.mertens_sum(DEFAULT_LIMITS.mertens_max_x * 10)

    def test_sum_matches_direct_fsum(self):
        x, h, D = 500, 200, 0.35
        direct = math.fsum(
            sorted(math.exp(-D * divisor.d_ij(n, 2, 3)) for n in range(x + 1, x + h + 1))
        )
        assert divisor.sum_S(divisor.Interval(x, h), 2, 3, D) == pytest.approx(
            direct, rel=1e-15
        )
