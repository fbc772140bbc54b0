"""Closed-form envelopes and constants used to compare against experiments.

Everything involving log log x is restricted to x >= 16 ( > e**e ), which
keeps the double log comfortably away from its singularity.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

MIN_X = 16.0


def _check_x(x: float) -> None:
    if x < MIN_X:
        raise DomainError(f"x must be >= {MIN_X:g}, got {x}")


def C_ij_scale(i: int, j: int) -> Fraction:
    """Exact rational part of C_{i,j}: 1/i + 1/j (the scalar on log 2)."""
    if i < 1 or j < 1:
        raise DomainError(f"exponents must be >= 1, got ({i}, {j})")
    return Fraction(1, i) + Fraction(1, j)


def C_ij(i: int, j: int) -> float:
    """log(2) * (1/i + 1/j); C_ij(2, 3) is exactly (5/6) log 2."""
    return math.log(2) * float(C_ij_scale(i, j))


def h_short(x: float, i: int, j: int, epsilon: float) -> float:
    """Short-interval length exp((C_{i,j} + 2*eps) * log x / log log x)."""
    _check_x(x)
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    lx = math.log(x)
    return math.exp((C_ij(i, j) + 2 * epsilon) * lx / math.log(lx))


def gap_envelope(x: float, epsilon: float, c_eps: float) -> float:
    """C_eps * exp((C_{2,3} + eps) * log x / log log x), the headline gap bound."""
    _check_x(x)
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if c_eps <= 0:
        raise DomainError(f"C_eps must be positive, got {c_eps}")
    lx = math.log(x)
    return c_eps * math.exp((C_ij(2, 3) + epsilon) * lx / math.log(lx))


def survival_bound(x: float, C: float, E: float, epsilon: float) -> float:
    """exp(-C*E*exp((C_{2,3}+eps) log x / log log x)); C and E are fit parameters."""
    _check_x(x)
    if C < 0 or E < 0:
        raise DomainError("C and E must be nonnegative")
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    lx = math.log(x)
    return math.exp(-C * E * math.exp((C_ij(2, 3) + epsilon) * lx / math.log(lx)))


def p_default(x: int) -> float:
    """The nondecreasing removal bias 1 - 1/log(x + 2), defined for x >= 2."""
    if x <= 1:
        raise DomainError(f"p_default needs x >= 2, got {x}")
    return 1.0 - 1.0 / math.log(x + 2)
