"""Exhaustive pruned search over pair selections in [1, N] for 3-GP freeness.

A selection picks at least one integer from every pair of consecutive
integers: disjoint pairing uses the pairs {2i-1, 2i} (and by monotonicity of
triple-hitting, exactly-one selections decide the at-least-one question too);
overlapping pairing uses every {i, i+1}, the reading under which gaps never
exceed one skipped integer.  The search decides whether some selection avoids
every triple x < y < z <= N with y**2 == x*z, returning an explicit
counterexample selection or an exhaustion certificate with statistics.

The engine is a DPLL-style backtracker.  Propagation rules:
  * a triple with two chosen members forbids its third member;
  * a forbidden element forces its pair neighbors (partner in disjoint mode,
    both adjacent integers in overlapping mode) to be chosen;
  * in disjoint mode a chosen element forbids its partner.
Elements belonging to no triple are chosen greedily up front: adding such an
element to any valid selection keeps it valid, so the restriction is sound
for both verdicts.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DomainError, MalformedSelection
from .gpcore import GPTriple, enumerate_3gp_triples
from .limits import DEFAULT_LIMITS, Limits

DISJOINT = "disjoint"
OVERLAPPING = "overlapping"

EXHAUSTED = "exhausted"
COUNTEREXAMPLE = "counterexample"
BUDGET_EXHAUSTED = "budget-exhausted"

ASCENDING = "ascending-pairs"
MOST_CONSTRAINED = "most-constrained-first"

_UNDEC, _IN, _OUT = 0, 1, 2


@dataclass(frozen=True)
class SearchInstance:
    n: int
    pairing: str
    pairs: tuple[tuple[int, int], ...]
    triples: tuple[GPTriple, ...]
    member: tuple[tuple[int, ...], ...]  # member[e] = indices of triples containing e


@dataclass
class SearchStats:
    nodes: int = 0
    prunings: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def bump(self, cause: str) -> None:
        self.prunings[cause] = self.prunings.get(cause, 0) + 1

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        for k, v in other.prunings.items():
            self.prunings[k] = self.prunings.get(k, 0) + v


@dataclass(frozen=True)
class SearchOutcome:
    verdict: str
    stats: SearchStats
    selection: Optional[tuple[int, ...]] = None  # present iff counterexample


def build_instance(n: int, pairing: str = DISJOINT) -> SearchInstance:
    if n < 4 or n % 2:
        raise DomainError(f"N must be even and >= 4, got {n}")
    if pairing not in (DISJOINT, OVERLAPPING):
        raise DomainError(f"unknown pairing {pairing!r}")
    triples = tuple(enumerate_3gp_triples(n))
    member: list[list[int]] = [[] for _ in range(n + 1)]
    for t, tr in enumerate(triples):
        for e in (tr.x, tr.y, tr.z):
            member[e].append(t)
    if pairing == DISJOINT:
        pairs = tuple((2 * i - 1, 2 * i) for i in range(1, n // 2 + 1))
    else:
        pairs = tuple((i, i + 1) for i in range(1, n))
    return SearchInstance(n, pairing, pairs, triples, tuple(tuple(m) for m in member))


def verify_selection(instance: SearchInstance, selection: Sequence[int]) -> Optional[GPTriple]:
    """Certificate check, independent of the search engine."""
    chosen = set(selection)
    if not chosen <= set(range(1, instance.n + 1)):
        raise MalformedSelection("selection contains integers outside [1, N]")
    for e1, e2 in instance.pairs:
        if e1 not in chosen and e2 not in chosen:
            raise MalformedSelection(f"pair {{{e1},{e2}}} has no selected element")
    if instance.pairing == DISJOINT:
        for e1, e2 in instance.pairs:
            if e1 in chosen and e2 in chosen:
                raise MalformedSelection(f"pair {{{e1},{e2}}} has both elements selected")
    counts = [0] * len(instance.triples)
    for e in chosen:
        for t in instance.member[e]:
            counts[t] += 1
            if counts[t] == 3:
                return instance.triples[t]
    return None


def export_dimacs(instance: SearchInstance) -> str:
    """CNF encoding: variable e = 'integer e selected'.

    One positive clause per pair (at least one selected) and one negative
    clause per triple (not all three selected).
    """
    lines = [
        f"c syndetic 3-GP instance N={instance.n} pairing={instance.pairing}",
        f"p cnf {instance.n} {len(instance.pairs) + len(instance.triples)}",
    ]
    for e1, e2 in instance.pairs:
        lines.append(f"{e1} {e2} 0")
    for tr in instance.triples:
        lines.append(f"-{tr.x} -{tr.y} -{tr.z} 0")
    return "\n".join(lines) + "\n"


class _Budget:
    __slots__ = ("nodes", "deadline")

    def __init__(self, limits: Limits):
        self.nodes = limits.search_node_budget
        self.deadline = (
            time.monotonic() + limits.search_time_budget_s
            if limits.search_time_budget_s is not None
            else None
        )

    def exceeded(self, nodes_used: int) -> bool:
        if self.nodes is not None and nodes_used > self.nodes:
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            return True
        return False


class _Engine:
    """Backtracking core shared by both pairings."""

    def __init__(self, instance: SearchInstance, order: str, propagation: bool,
                 limits: Limits):
        self.inst = instance
        self.order = order
        self.propagation = propagation
        self.budget = _Budget(limits)
        self.disjoint = instance.pairing == DISJOINT
        n = instance.n
        self.n = n
        if self.disjoint:
            self.partner = [0] * (n + 1)
            for e1, e2 in instance.pairs:
                self.partner[e1] = e2
                self.partner[e2] = e1
        self.state = bytearray(n + 1)
        self.tcount = [0] * len(instance.triples)
        self.trail: list[int] = []  # signed: +e set IN, -e set OUT
        self.stats = SearchStats()
        # triple elements as flat tuples for quick scanning
        self.telems = [(tr.x, tr.y, tr.z) for tr in instance.triples]

    # -- propagation ---------------------------------------------------------

    def _set_in(self, e: int, queue: list) -> bool:
        state = self.state
        if state[e] == _IN:
            return True
        if state[e] == _OUT:
            self.stats.bump("element-both-forced")
            return False
        state[e] = _IN
        self.trail.append(e)
        if self.disjoint:
            queue.append(-self.partner[e])
        tcount = self.tcount
        member = self.inst.member[e]
        complete = False
        # increment all counters before any early exit so undo stays symmetric
        for t in member:
            tcount[t] += 1
            if tcount[t] == 3:
                complete = True
        if complete:
            self.stats.bump("triple-complete")
            return False
        if self.propagation:
            for t in member:
                if tcount[t] == 2:
                    x, y, z = self.telems[t]
                    third = x if state[x] != _IN else (y if state[y] != _IN else z)
                    if state[third] == _UNDEC:
                        queue.append(-third)
        return True

    def _set_out(self, e: int, queue: list) -> bool:
        state = self.state
        if state[e] == _OUT:
            return True
        if state[e] == _IN:
            self.stats.bump("element-both-forced")
            return False
        state[e] = _OUT
        self.trail.append(-e)
        if self.disjoint:
            queue.append(self.partner[e])
        elif self.propagation:
            # both overlapping pairs through e now need their other element
            if e > 1:
                queue.append(e - 1)
            if e < self.n:
                queue.append(e + 1)
        else:
            # propagation off: still reject a violated pair immediately
            if (e > 1 and state[e - 1] == _OUT) or (e < self.n and state[e + 1] == _OUT):
                self.stats.bump("pair-unselected")
                return False
        return True

    def assign(self, lit: int) -> bool:
        """Assign literal (+e IN / -e OUT) and run propagation to fixpoint."""
        queue = [lit]
        while queue:
            q = queue.pop()
            ok = self._set_in(q, queue) if q > 0 else self._set_out(-q, queue)
            if not ok:
                return False
        return True

    def undo(self, mark: int) -> None:
        state, tcount = self.state, self.tcount
        member = self.inst.member
        while len(self.trail) > mark:
            s = self.trail.pop()
            e = abs(s)
            state[e] = _UNDEC
            if s > 0:
                for t in member[e]:
                    tcount[t] -= 1

    # -- preprocessing -------------------------------------------------------

    def preassign_unconstrained(self) -> bool:
        """Select triple-free elements up front; sound by monotonicity."""
        member = self.inst.member
        for e in range(1, self.n + 1):
            if not member[e] and self.state[e] == _UNDEC:
                if not self.assign(e):
                    return False
        return True

    # -- branching -----------------------------------------------------------

    def next_pair(self, start: int) -> int:
        pairs, state = self.inst.pairs, self.state
        if self.order == ASCENDING:
            for i in range(start, len(pairs)):
                e1, e2 = pairs[i]
                if state[e1] == _UNDEC or state[e2] == _UNDEC:
                    return i
            return -1
        best, best_score = -1, -1
        tcount, member = self.tcount, self.inst.member
        for i in range(start, len(pairs)):
            e1, e2 = pairs[i]
            if state[e1] != _UNDEC and state[e2] != _UNDEC:
                continue
            score = 0
            for e in (e1, e2):
                if state[e] == _UNDEC:
                    for t in member[e]:
                        score += tcount[t] * tcount[t]
            if score > best_score:
                best, best_score = i, score
        return best

    def branch_literals(self, i: int) -> list[int]:
        """Decision literals for pair i; each branch decides >= 1 element."""
        e1, e2 = self.inst.pairs[i]
        s1, s2 = self.state[e1], self.state[e2]
        if self.disjoint:
            # pair untouched (propagation keeps pairs atomic in disjoint mode)
            return [e1, e2]
        # overlapping: branch on the first undecided element of the pair
        e = e1 if s1 == _UNDEC else e2
        return [-e, e]  # try OUT first: it forces both neighbors IN

    def dfs(self, start: int) -> str:
        i = self.next_pair(start)
        if i < 0:
            return COUNTEREXAMPLE
        self.stats.nodes += 1
        if self.budget.exceeded(self.stats.nodes):
            return BUDGET_EXHAUSTED
        nxt = i if self.order == ASCENDING else start
        for lit in self.branch_literals(i):
            mark = len(self.trail)
            if self.assign(lit):
                r = self.dfs(nxt)
                if r != EXHAUSTED:
                    return r
            self.undo(mark)
        return EXHAUSTED

    def selection(self) -> tuple[int, ...]:
        return tuple(e for e in range(1, self.n + 1) if self.state[e] == _IN)


def _search_task(instance, order, propagation, limits, prefix):
    """One subtree: apply forced prefix literals, then exhaust it."""
    eng = _Engine(instance, order, propagation, limits)
    if not eng.preassign_unconstrained():
        return EXHAUSTED, eng.stats, None
    for lit in prefix:
        e = abs(lit)
        want = _IN if lit > 0 else _OUT
        if eng.state[e] == want:
            continue
        if eng.state[e] != _UNDEC or not eng.assign(lit):
            return EXHAUSTED, eng.stats, None
    verdict = eng.dfs(0)
    sel = eng.selection() if verdict == COUNTEREXAMPLE else None
    return verdict, eng.stats, sel


def _prefix_literals(eng: _Engine, depth: int) -> list[list[int]]:
    """Branch literals of the first `depth` undecided pairs."""
    out = []
    for i in range(len(eng.inst.pairs)):
        e1, e2 = eng.inst.pairs[i]
        if eng.state[e1] == _UNDEC or eng.state[e2] == _UNDEC:
            out.append(eng.branch_literals(i))
            if len(out) == depth:
                break
    return out


def search(
    instance: SearchInstance,
    order: str = ASCENDING,
    propagation: bool = True,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> SearchOutcome:
    """Decide the instance.

    The verdict is deterministic regardless of worker count, and under the
    default ascending pair order so is the counterexample witness; node
    statistics are not.  Counterexamples are re-checked through
    verify_selection before being returned.
    """
    if order not in (ASCENDING, MOST_CONSTRAINED):
        raise DomainError(f"unknown order {order!r}")
    t0 = time.perf_counter()
    if workers <= 1:
        verdict, stats, sel = _search_task(instance, order, propagation, limits, ())
        outcome = SearchOutcome(verdict, stats, sel)
    else:
        outcome = _search_parallel(instance, order, propagation, workers, limits)
    outcome.stats.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    if outcome.verdict == COUNTEREXAMPLE:
        witness = verify_selection(instance, outcome.selection)
        assert witness is None, "engine produced an invalid counterexample"
    return outcome


def _search_parallel(instance, order, propagation, workers, limits):
    probe = _Engine(instance, order, propagation, limits)
    probe.preassign_unconstrained()
    depth = max(1, (workers - 1).bit_length()) + 3
    branch_lits = _prefix_literals(probe, depth)
    depth = len(branch_lits)
    if depth == 0:
        verdict, stats, sel = _search_task(instance, order, propagation, limits, ())
        return SearchOutcome(verdict, stats, sel)
    # enumerate prefixes in DFS visitation order (first pair most
    # significant) so the first counterexample matches the serial search
    prefixes = []
    for bits in range(1 << depth):
        prefixes.append(
            tuple(branch_lits[d][(bits >> (depth - 1 - d)) & 1] for d in range(depth))
        )
    total = SearchStats()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = pool.map(
            _search_task,
            [instance] * len(prefixes),
            [order] * len(prefixes),
            [propagation] * len(prefixes),
            [limits] * len(prefixes),
            prefixes,
        )
        # consume in prefix order so any counterexample is deterministic
        for verdict, stats, sel in results:
            total.merge(stats)
            if verdict == COUNTEREXAMPLE:
                pool.shutdown(wait=False, cancel_futures=True)
                return SearchOutcome(COUNTEREXAMPLE, total, sel)
            if verdict == BUDGET_EXHAUSTED:
                pool.shutdown(wait=False, cancel_futures=True)
                return SearchOutcome(BUDGET_EXHAUSTED, total)
    return SearchOutcome(EXHAUSTED, total)
