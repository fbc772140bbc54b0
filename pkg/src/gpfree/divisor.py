"""Divisor-counting functions d_k and d_{i,j}, segmented sieves, and the
short-interval sums S_{i,j}(x, h, D) = sum exp(-D*d_{i,j}(n)) over (x, x+h].

d_k(n) counts k-th powers dividing n; per prime power p**alpha it contributes
floor(alpha/k) + 1.  d_{i,j}(n) counts pairs (a, b) with a**i * b**j | n; per
prime power it contributes the lattice points under i*e + j*f <= alpha.  Both
are multiplicative, which the test suite confirms against literal pair
counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import DomainError, ResourceLimit
from .limits import DEFAULT_LIMITS, Limits

Factorization = list[tuple[int, int]]


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, ascending (classic boolean sieve)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def factorize(n: int) -> Factorization:
    """Prime factorization by trial division; factorize(1) == []."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    out: Factorization = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    d = 5
    while d * d <= n:
        for p in (d, d + 2):  # 6k-1, 6k+1
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=None)
def _lattice_count(alpha: int, i: int, j: int) -> int:
    """#{(e, f) >= 0 : i*e + j*f <= alpha}."""
    return sum((alpha - i * e) // j + 1 for e in range(alpha // i + 1))


def d_k(n: int, k: int) -> int:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    prod = 1
    for _, alpha in factorize(n):
        prod *= alpha // k + 1
    return prod


def d_ij(n: int, i: int, j: int) -> int:
    if i < 1 or j < 1:
        raise DomainError(f"exponents must be >= 1, got ({i}, {j})")
    prod = 1
    for _, alpha in factorize(n):
        prod *= _lattice_count(alpha, i, j)
    return prod


@dataclass(frozen=True)
class DivisorSpec:
    """Either a single exponent k (d_k) or a pair (i, j) (d_{i,j})."""

    k: int | None = None
    i: int | None = None
    j: int | None = None

    def __post_init__(self):
        if self.k is not None:
            if self.i is not None or self.j is not None:
                raise DomainError("give either k or (i, j), not both")
            if self.k < 1:
                raise DomainError(f"k must be >= 1, got {self.k}")
        else:
            if self.i is None or self.j is None:
                raise DomainError("pair spec needs both i and j")
            if self.i < 1 or self.j < 1:
                raise DomainError(f"exponents must be >= 1, got ({self.i}, {self.j})")

    @classmethod
    def single(cls, k: int) -> "DivisorSpec":
        return cls(k=k)

    @classmethod
    def pair(cls, i: int, j: int) -> "DivisorSpec":
        return cls(i=i, j=j)

    def weight(self, alpha: int) -> int:
        """Contribution of a prime power p**alpha."""
        if self.k is not None:
            return alpha // self.k + 1
        return _lattice_count(alpha, self.i, self.j)

    def of(self, n: int) -> int:
        """Pointwise value."""
        if self.k is not None:
            return d_k(n, self.k)
        return d_ij(n, self.i, self.j)

    def label(self) -> str:
        return f"d_{self.k}" if self.k is not None else f"d_{{{self.i},{self.j}}}"


@dataclass(frozen=True)
class Interval:
    """Half-open window (x, x+h]; entries are n = x+1 .. x+h."""

    x: int
    h: int

    def __post_init__(self):
        if self.x < 0:
            raise DomainError(f"x must be >= 0, got {self.x}")
        if self.h < 1:
            raise DomainError(f"h must be >= 1, got {self.h}")
        if self.x + self.h > 2**63 - 1:
            raise DomainError("interval end exceeds supported width")

    def values(self) -> range:
        return range(self.x + 1, self.x + self.h + 1)


@dataclass(frozen=True)
class DivisorTable:
    interval: Interval
    spec: DivisorSpec
    values: tuple[int, ...]  # values[t] == spec.of(x + 1 + t)

    def rows(self):
        for t, v in enumerate(self.values):
            yield self.interval.x + 1 + t, v


def sieve(interval: Interval, spec: DivisorSpec, limits: Limits = DEFAULT_LIMITS) -> DivisorTable:
    """Segmented bulk evaluation over (x, x+h].

    Only primes <= sqrt(x+h) are sieved; whatever cofactor remains after
    dividing those out is a prime > sqrt(x+h) with exponent 1.
    """
    if interval.h > limits.sieve_max_len:
        raise ResourceLimit(
            f"window length {interval.h} exceeds budget {limits.sieve_max_len}"
        )
    x, h = interval.x, interval.h
    end = x + h
    vals = [1] * h
    rem = list(interval.values())
    for p in primes_upto(isqrt(end)).tolist():
        first = ((x + 1 + p - 1) // p) * p  # smallest multiple of p > x
        for m in range(first, end + 1, p):
            t = m - x - 1
            alpha = 0
            r = rem[t]
            while r % p == 0:
                r //= p
                alpha += 1
            rem[t] = r
            vals[t] *= spec.weight(alpha)
    for t, r in enumerate(rem):
        if r > 1:
            vals[t] *= spec.weight(1)
    return DivisorTable(interval, spec, tuple(vals))


def sum_S(
    interval: Interval, i: int, j: int, D: float, limits: Limits = DEFAULT_LIMITS
) -> float:
    """S_{i,j}(x, h, D) = sum over n in (x, x+h] of exp(-D * d_{i,j}(n)).

    Accumulated with math.fsum in ascending n, so the result is deterministic
    and exactly rounded.
    """
    if D <= 0:
        raise DomainError(f"D must be positive, got {D}")
    table = sieve(interval, DivisorSpec.pair(i, j), limits)
    return math.fsum(math.exp(-D * v) for v in table.values)


def mertens_sum(x: int, limits: Limits = DEFAULT_LIMITS) -> float:
    """Sum of 1/p over primes p <= x (the sum behind log log x + O(1))."""
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    if x > limits.mertens_max_x:
        raise ResourceLimit(f"x = {x} exceeds budget {limits.mertens_max_x}")
    ps = primes_upto(x)
    return math.fsum((1.0 / ps).tolist())
