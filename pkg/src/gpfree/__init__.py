"""Geometric-progression-free sequences with small gaps: core machinery.

Subpackages:
  gpcore    canonical k-GP representation, enumeration, membership
  divisor   d_k / d_{i,j}, segmented sieves, short-interval sums
  bounds    envelope functions and explicit constants
  process   the three randomized GP-removal processes
  syndetic  exhaustive pair-selection search on [1, N]
  cli       command-line front end
"""

__version__ = "0.1.0"

from . import bounds, divisor, gpcore, process, syndetic  # noqa: F401
from .errors import (  # noqa: F401
    DomainError,
    GPFreeError,
    MalformedSelection,
    NotAGeometricProgression,
    ResourceLimit,
    TooFewSurvivors,
    TrivialProgression,
)
from .limits import DEFAULT_LIMITS, Limits  # noqa: F401
