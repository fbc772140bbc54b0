import pytest

from gpfree import syndetic
from gpfree.errors import DomainError, MalformedSelection
from gpfree.limits import DEFAULT_LIMITS

from oracles import (
    brute_3gp_triples,
    brute_disjoint_free_selection,
    brute_overlapping_free_selection,
)


class TestInstance:
    @staticmethod
    def _triples(inst):
        return tuple((t.x, t.y, t.z) for t in inst.triples)

    def test_n4_disjoint(self):
        inst = syndetic.build_instance(4, syndetic.DISJOINT)
        assert inst.pairs == ((1, 2), (3, 4))
        assert self._triples(inst) == ((1, 2, 4),)

    def test_n10_disjoint(self):
        inst = syndetic.build_instance(10, syndetic.DISJOINT)
        assert len(inst.pairs) == 5
        assert self._triples(inst) == ((1, 2, 4), (1, 3, 9), (2, 4, 8), (4, 6, 9))

    def test_n640_shape(self):
        inst = syndetic.build_instance(640, syndetic.DISJOINT)
        assert len(inst.pairs) == 320
        assert len(inst.triples) == len(brute_3gp_triples(640))

    def test_overlapping_pairs(self):
        inst = syndetic.build_instance(6, syndetic.OVERLAPPING)
        assert inst.pairs == ((1, 2), (2, 3), (3, 4), (4, 5), (5, 6))

    def test_odd_n_rejected(self):
        with pytest.raises(DomainError):
            syndetic.build_instance(7, syndetic.DISJOINT)


class TestVerifySelection:
    def test_triple_found(self):
        inst = syndetic.build_instance(10, syndetic.DISJOINT)
        w = syndetic.verify_selection(inst, [2, 4, 6, 8, 10])
        assert w is not None and (w.x, w.y, w.z) == (2, 4, 8)

    def test_triple_free(self):
        inst = syndetic.build_instance(10, syndetic.DISJOINT)
        assert syndetic.verify_selection(inst, [1, 3, 6, 8, 10]) is None

    def test_missing_pair_rejected(self):
        inst = syndetic.build_instance(10, syndetic.DISJOINT)
        with pytest.raises(MalformedSelection):
            syndetic.verify_selection(inst, [1, 3, 8, 10])  # pair {5,6} unhit

    def test_out_of_range_rejected(self):
        inst = syndetic.build_instance(10, syndetic.DISJOINT)
        with pytest.raises(MalformedSelection):
            syndetic.verify_selection(inst, [1, 3, 6, 8, 10, 11])


class TestDimacs:
    def test_n10_clause_counts(self):
        text = syndetic.export_dimacs(syndetic.build_instance(10, syndetic.DISJOINT))
        clauses = [ln for ln in text.splitlines()
                   if ln and not ln.startswith(("c", "p"))]
        positive = [c for c in clauses if not c.startswith("-")]
        negative = [c for c in clauses if c.startswith("-")]
        assert len(positive) == 5 and len(negative) == 4
        assert "p cnf 10 9" in text


class TestSearchSmall:
    def test_n4_counterexample(self):
        out = syndetic.search(syndetic.build_instance(4, syndetic.DISJOINT))
        assert out.verdict == syndetic.COUNTEREXAMPLE
        assert syndetic.verify_selection(
            syndetic.build_instance(4, syndetic.DISJOINT), out.selection) is None

    @pytest.mark.parametrize("n", range(4, 42, 2))
    def test_disjoint_agrees_with_literal_enumeration(self, n):
        out = syndetic.search(syndetic.build_instance(n, syndetic.DISJOINT))
        brute = brute_disjoint_free_selection(n)
        if brute is None:
            assert out.verdict == syndetic.EXHAUSTED
        else:
            assert out.verdict == syndetic.COUNTEREXAMPLE

    @pytest.mark.parametrize("n", range(4, 28, 2))
    def test_overlapping_agrees_with_oracle(self, n):
        out = syndetic.search(syndetic.build_instance(n, syndetic.OVERLAPPING))
        brute = brute_overlapping_free_selection(n)
        if brute is None:
            assert out.verdict == syndetic.EXHAUSTED
        else:
            assert out.verdict == syndetic.COUNTEREXAMPLE


class TestSearchConfigurations:
    @pytest.mark.parametrize("order", [syndetic.ASCENDING, syndetic.MOST_CONSTRAINED])
    @pytest.mark.parametrize("propagation", [True, False])
    def test_verdict_stable_under_config(self, order, propagation):
        for n in (12, 20, 28):
            inst = syndetic.build_instance(n, syndetic.DISJOINT)
            out = syndetic.search(inst, order=order, propagation=propagation)
            base = syndetic.search(inst)
            assert out.verdict == base.verdict

    def test_counterexamples_always_verified(self):
        inst = syndetic.build_instance(200, syndetic.DISJOINT)
        out = syndetic.search(inst, order=syndetic.MOST_CONSTRAINED)
        assert out.verdict == syndetic.COUNTEREXAMPLE
        assert syndetic.verify_selection(inst, out.selection) is None

    def test_worker_verdict_invariance(self):
        inst = syndetic.build_instance(200, syndetic.DISJOINT)
        outs = [syndetic.search(inst, workers=w) for w in (1, 2, 8)]
        assert len({o.verdict for o in outs}) == 1
        assert len({tuple(o.selection) for o in outs}) == 1

    def test_budget_exhaustion(self):
        limits = DEFAULT_LIMITS.with_overrides(search_node_budget=3)
        out = syndetic.search(
            syndetic.build_instance(640, syndetic.OVERLAPPING),
            propagation=False, limits=limits,
        )
        assert out.verdict == syndetic.BUDGET_EXHAUSTED
        assert out.selection is None

    def test_stats_reported(self):
        out = syndetic.search(syndetic.build_instance(40, syndetic.DISJOINT))
        assert out.stats.nodes >= 1
        assert out.stats.elapsed_ms >= 0.0


class TestHeadlineSizes:
    def test_overlapping_640_exhausted(self):
        out = syndetic.search(syndetic.build_instance(640, syndetic.OVERLAPPING))
        assert out.verdict == syndetic.EXHAUSTED

    def test_overlapping_638_still_open(self):
        out = syndetic.search(syndetic.build_instance(638, syndetic.OVERLAPPING))
        assert out.verdict == syndetic.COUNTEREXAMPLE

    def test_disjoint_640_has_free_selection(self):
        inst = syndetic.build_instance(640, syndetic.DISJOINT)
        out = syndetic.search(inst)
        assert out.verdict == syndetic.COUNTEREXAMPLE
        assert syndetic.verify_selection(inst, out.selection) is None
