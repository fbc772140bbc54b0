"""Seeded simulation of the three randomized GP-removal processes.

Each process walks every progression in its target family whose smaller
removable term is at most the horizon N, flips a per-progression coin, and
removes one of two designated terms.  Progressions whose removable terms both
exceed N cannot touch [1, N], so this truncation determines the survivor set
T intersected with [1, N] exactly.

Coins are a pure 64-bit hash of (seed, k, a, b, c) rather than draws from a
sequential stream: the result is independent of enumeration order, chunking,
and worker count, and enlarging N never changes the coin of an
already-enumerated progression.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from math import gcd, isqrt
from typing import Callable, Optional

from .bounds import gap_envelope, p_default
from .errors import DomainError, ResourceLimit, TooFewSurvivors
from .gpcore import (
    INTEGER,
    RATIONAL,
    KGeoProgression,
    contains_gp,
    find_gps_with_term_at,
)
from .limits import DEFAULT_LIMITS, Limits

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_HALF = 1 << 63  # coin < 1/2  <=>  hash bits < 2**63
_INV53 = 2.0**-53

CoinFn = Callable[[int, int, int, int, int], float]


def _mix64(z: int) -> int:
    """Finalizer-style 64-bit avalanche (murmur3 fmix constants)."""
    z &= _M64
    z ^= z >> 33
    z = (z * 0xFF51AFD7ED558CCD) & _M64
    z ^= z >> 33
    z = (z * 0xC4CEB9FE1A85EC53) & _M64
    z ^= z >> 33
    return z


def coin_bits(seed: int, k: int, a: int, b: int, c: int) -> int:
    h = seed & _M64
    for v in (k, a, b, c):
        h = _mix64(h ^ ((v * _GOLDEN) & _M64))
    return h


def coin(seed: int, gp: KGeoProgression) -> float:
    """Deterministic uniform value in [0, 1) attached to (seed, gp)."""
    return (coin_bits(seed, gp.k, gp.a, gp.b, gp.c) >> 11) * _INV53


def derive_seed(seed: int, index: int) -> int:
    """Per-trial sub-seed; stable under extending the trial count."""
    return _mix64(_mix64(seed & _M64) ^ ((index * _GOLDEN) & _M64))


class ProcessKind(str, Enum):
    SIX_GP = "6gp"
    FIVE_GP = "5gp"
    THREE_GP_INT = "3gp-int"


@dataclass(frozen=True)
class ProcessConfig:
    kind: ProcessKind
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 16:
            raise DomainError(f"horizon must be >= 16, got {self.n}")
        if not 0 <= self.seed <= _M64:
            raise DomainError("seed must fit in 64 bits")


@dataclass(frozen=True)
class ProcessRun:
    config: ProcessConfig
    removed: tuple[int, ...]  # sorted, subset of [1, n]
    dropped_outside: int      # removals that landed above the horizon

    def removed_set(self) -> frozenset[int]:
        return frozenset(self.removed)

    def survivors(self) -> list[int]:
        gone = set(self.removed)
        return [n for n in range(1, self.config.n + 1) if n not in gone]


# ---------------------------------------------------------------------------
# enumeration kernels (top-level so worker processes can pickle them)

def _bc_classes(n: int, eb: int, ec: int) -> list[tuple[int, int]]:
    """Coprime (b, c), b < c, with b**eb * c**ec <= n."""
    out = []
    c = 2
    while c**ec <= n:
        for b in range(1, c):
            if b**eb * c**ec > n:
                break
            if gcd(b, c) == 1:
                out.append((b, c))
        c += 1
    return out


def _kernel_6gp(seed, n, classes, coin_fn=None):
    removed, dropped = set(), 0
    for b, c in classes:
        w2 = b * b * b * c * c
        w3 = b * b * c * c * c
        for a in range(1, n // w2 + 1):
            if coin_fn is None:
                below = coin_bits(seed, 6, a, b, c) < _HALF
            else:
                below = coin_fn(seed, 6, a, b, c) < 0.5
            u = a * w2 if below else a * w3
            if u <= n:
                removed.add(u)
            else:
                dropped += 1
    return removed, dropped


def _kernel_5gp(seed, n, classes, coin_fn=None):
    removed, dropped = set(), 0
    log = math.log
    for b, c in classes:
        w1 = b * b * b * c      # second term weight
        w2 = b * b * c * c      # middle (third) term weight
        for a in range(1, n // w1 + 1):
            if coin_fn is None:
                u01 = (coin_bits(seed, 5, a, b, c) >> 11) * _INV53
            else:
                u01 = coin_fn(seed, 5, a, b, c)
            mid = a * w2
            # remove the middle with probability p(mid), else the second term
            u = mid if u01 < 1.0 - 1.0 / log(mid + 2) else a * w1
            if u <= n:
                removed.add(u)
            else:
                dropped += 1
    return removed, dropped


def _kernel_3gp_int(seed, n, ratios, coin_fn=None):
    removed, dropped = set(), 0
    log = math.log
    for r in ratios:
        rr = r * r
        for a in range(1, n // r + 1):
            if coin_fn is None:
                u01 = (coin_bits(seed, 3, a, 1, r) >> 11) * _INV53
            else:
                u01 = coin_fn(seed, 3, a, 1, r)
            third = a * rr
            u = third if u01 < 1.0 - 1.0 / log(third + 2) else a * r
            if u <= n:
                removed.add(u)
            else:
                dropped += 1
    return removed, dropped


def _classes_for(kind: ProcessKind, n: int):
    if kind is ProcessKind.SIX_GP:
        return _bc_classes(n, 3, 2)      # smaller middle a*b^3*c^2 <= n
    if kind is ProcessKind.FIVE_GP:
        return _bc_classes(n, 3, 1)      # second term a*b^3*c <= n
    return list(range(2, n + 1))         # integer ratios with a*r <= n

_KERNELS = {
    ProcessKind.SIX_GP: _kernel_6gp,
    ProcessKind.FIVE_GP: _kernel_5gp,
    ProcessKind.THREE_GP_INT: _kernel_3gp_int,
}


def run(
    config: ProcessConfig,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
    coin_fn: Optional[CoinFn] = None,
) -> ProcessRun:
    """Execute one process realization; bit-identical for any worker count."""
    if config.n > limits.process_max_n:
        raise ResourceLimit(f"horizon {config.n} exceeds budget {limits.process_max_n}")
    kernel = _KERNELS[config.kind]
    classes = _classes_for(config.kind, config.n)
    if workers <= 1 or len(classes) < 2 * workers:
        removed, dropped = kernel(config.seed, config.n, classes, coin_fn)
    else:
        if coin_fn is not None:
            raise DomainError("coin_fn overrides are single-worker only")
        chunks = [classes[i::workers] for i in range(workers)]
        removed, dropped = set(), 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(kernel, config.seed, config.n, ch) for ch in chunks]
            for f in futs:
                part, d = f.result()
                removed |= part
                dropped += d
    return ProcessRun(config, tuple(sorted(removed)), dropped)


def run_6gp(config: ProcessConfig, **kw) -> ProcessRun:
    if config.kind is not ProcessKind.SIX_GP:
        raise DomainError(f"expected kind 6gp, got {config.kind.value}")
    return run(config, **kw)


def run_5gp(config: ProcessConfig, **kw) -> ProcessRun:
    if config.kind is not ProcessKind.FIVE_GP:
        raise DomainError(f"expected kind 5gp, got {config.kind.value}")
    return run(config, **kw)


def run_3gp_int(config: ProcessConfig, **kw) -> ProcessRun:
    if config.kind is not ProcessKind.THREE_GP_INT:
        raise DomainError(f"expected kind 3gp-int, got {config.kind.value}")
    return run(config, **kw)


_TARGET_FAMILY = {
    ProcessKind.SIX_GP: (6, RATIONAL),
    ProcessKind.FIVE_GP: (5, RATIONAL),
    ProcessKind.THREE_GP_INT: (3, INTEGER),
}


def verify_free(run_: ProcessRun) -> Optional[KGeoProgression]:
    """Witness GP of the kind's target family among the survivors, if any."""
    k, mode = _TARGET_FAMILY[run_.config.kind]
    survivors = run_.survivors()
    if len(survivors) < k:
        return None
    return contains_gp(survivors, k, mode)


# ---------------------------------------------------------------------------
# gap analysis

@dataclass(frozen=True)
class GapReport:
    epsilon: float
    gaps: tuple[tuple[int, int], ...]  # (t_i, t_{i+1} - t_i) for t_i >= 16
    max_gap: int
    fitted_c_eps: float


def gap_report(run_: ProcessRun, epsilon: float) -> GapReport:
    """Gap statistics of the survivors against the main gap envelope.

    fitted_c_eps is the smallest C_eps for which every measured gap satisfies
    gap <= gap_envelope(t_i, epsilon, C_eps).
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    survivors = [t for t in run_.survivors() if t >= 16]
    if len(survivors) < 2:
        raise TooFewSurvivors("need at least two survivors >= 16")
    gaps = tuple(
        (t, t_next - t) for t, t_next in zip(survivors, survivors[1:])
    )
    fitted = max(g / gap_envelope(t, epsilon, 1.0) for t, g in gaps)
    return GapReport(epsilon, gaps, max(g for _, g in gaps), fitted)


# ---------------------------------------------------------------------------
# Monte Carlo survival-probability estimation

@dataclass(frozen=True)
class SurvivalEstimate:
    kind: ProcessKind
    x: int
    h: int
    trials: int
    empties: int

    @property
    def estimate(self) -> float:
        return self.empties / self.trials


def _removal_events(kind: ProcessKind, n: int) -> list[tuple[tuple[int, int, int, int], float, bool]]:
    """Events that would remove n: (coin key, threshold, fires-when-below).

    Keys identify the progression; n is removed in a trial iff at least one
    event's coin falls on its firing side.  Equivalent to running the full
    truncated process, since any progression able to remove n has its smaller
    removable term <= n and is therefore enumerated.
    """
    events = []
    if kind is ProcessKind.SIX_GP:
        for gp in find_gps_with_term_at(n, 6, 2):
            events.append(((6, gp.a, gp.b, gp.c), 0.5, True))
        for gp in find_gps_with_term_at(n, 6, 3):
            events.append(((6, gp.a, gp.b, gp.c), 0.5, False))
    elif kind is ProcessKind.FIVE_GP:
        for gp in find_gps_with_term_at(n, 5, 1):
            mid = gp.term_at(2)
            events.append(((5, gp.a, gp.b, gp.c), p_default(mid), False))
        for gp in find_gps_with_term_at(n, 5, 2):
            events.append(((5, gp.a, gp.b, gp.c), p_default(n), True))
    else:
        divisors = set()
        for d in range(1, isqrt(n) + 1):
            if n % d == 0:
                divisors.update((d, n // d))
        for r in sorted(divisors):
            if r < 2:
                continue
            a = n // r  # n = a*r, second term
            events.append(((3, a, 1, r), p_default(a * r * r), False))
            if n % (r * r) == 0:  # n = a*r**2, third term
                events.append(((3, n // (r * r), 1, r), p_default(n), True))
    return events


def survival_probability(
    kind: ProcessKind,
    x: int,
    h: int,
    trials: int,
    seed: int,
    limits: Limits = DEFAULT_LIMITS,
) -> SurvivalEstimate:
    """Fraction of independent trials in which (x, x+h] is wiped out.

    For the 6-GP process the window must satisfy h < sqrt(x): that is the
    hypothesis under which no progression has both middle terms inside the
    window, making the per-element removal events independent.  The
    separation is verified, not assumed.
    """
    if x < 16:
        raise DomainError(f"x must be >= 16, got {x}")
    if h < 1 or trials < 1:
        raise DomainError("h and trials must be positive")
    if x + h > limits.process_max_n:
        raise ResourceLimit(f"x + h exceeds budget {limits.process_max_n}")
    if kind is ProcessKind.SIX_GP and h * h >= x:
        raise DomainError(f"6gp window needs h < sqrt(x); got h={h}, x={x}")

    window = range(x + 1, x + h + 1)
    events_by_n = {n: _removal_events(kind, n) for n in window}

    if kind is ProcessKind.SIX_GP:
        seen: dict[tuple[int, int, int, int], int] = {}
        for n, events in events_by_n.items():
            for key, _, _ in events:
                if key in seen and seen[key] != n:
                    raise DomainError(
                        f"middle terms {seen[key]} and {n} of one 6-GP share the window"
                    )
                seen[key] = n

    empties = 0
    for t in range(trials):
        ts = derive_seed(seed, t)
        wiped = True
        for n in window:
            removed = False
            for (k, a, b, c), thr, below in events_by_n[n]:
                u = (coin_bits(ts, k, a, b, c) >> 11) * _INV53
                if (u < thr) == below:
                    removed = True
                    break
            if not removed:
                wiped = False
                break
        if wiped:
            empties += 1
    return SurvivalEstimate(kind, x, h, trials, empties)


# ---------------------------------------------------------------------------
# serialization

def run_to_dict(run_: ProcessRun) -> dict:
    return {
        "config": {
            "kind": run_.config.kind.value,
            "n": run_.config.n,
            "seed": run_.config.seed,
        },
        "removed": list(run_.removed),
        "counts": {
            "removed": len(run_.removed),
            "survivors": run_.config.n - len(run_.removed),
            "dropped_outside": run_.dropped_outside,
        },
    }


def run_to_json(run_: ProcessRun) -> str:
    """Canonical (sorted-key, no-whitespace) JSON; byte-stable per config."""
    return json.dumps(run_to_dict(run_), sort_keys=True, separators=(",", ":"))


def run_from_dict(d: dict) -> ProcessRun:
    cfg = ProcessConfig(ProcessKind(d["config"]["kind"]), d["config"]["n"], d["config"]["seed"])
    return ProcessRun(cfg, tuple(d["removed"]), d["counts"]["dropped_outside"])


def run_from_json(s: str) -> ProcessRun:
    return run_from_dict(json.loads(s))


def run_to_bitmap(run_: ProcessRun) -> bytes:
    """Little-endian 64-bit words; bit t set means integer t+1 was removed."""
    n = run_.config.n
    nwords = (n + 63) // 64
    words = [0] * nwords
    for u in run_.removed:
        t = u - 1
        words[t >> 6] |= 1 << (t & 63)
    out = bytearray()
    for w in words:
        out += w.to_bytes(8, "little")
    return bytes(out)


def bitmap_to_removed(blob: bytes, n: int) -> tuple[int, ...]:
    """Inverse of run_to_bitmap (for a known horizon n)."""
    removed = []
    for wi in range(len(blob) // 8):
        w = int.from_bytes(blob[8 * wi : 8 * wi + 8], "little")
        while w:
            low = w & -w
            t = 64 * wi + low.bit_length() - 1
            if t < n:
                removed.append(t + 1)
            w ^= low
    return tuple(removed)
