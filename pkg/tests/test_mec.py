from math import factorial

import pytest
from hypothesis import given, settings

from cold.dp import DpTable
from cold.graph import MixedGraph, arc, random_chordal
from cold.mec import MecStats, brute_force_mec_size, closed_form_size, count_mec
from conftest import uccgs
from oracles import extensions


def n_members(g):
    return sum(1 for _ in extensions(g))


class TestExamples:
    def test_single_edge(self):
        g = MixedGraph.undirected(2, [(0, 1)])
        assert count_mec(g) == brute_force_mec_size(g) == 2

    def test_path(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2)])
        assert count_mec(g) == brute_force_mec_size(g) == 3

    def test_triangle(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2), (0, 2)])
        assert count_mec(g) == brute_force_mec_size(g) == 6

    def test_k4(self):
        g = MixedGraph.undirected(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
        assert count_mec(g) == count_mec(g, closed_forms=False) == 24

    def test_reference_graph(self, five):
        g = five.graph
        assert count_mec(g) == count_mec(g, closed_forms=False) == count_mec(g, conventional_root=True) == 12
        assert brute_force_mec_size(g) == n_members(g) == 12

    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_trees_have_n_members(self, n):
        star = MixedGraph.undirected(n, [(0, i) for i in range(1, n)])
        path = MixedGraph.undirected(n, [(i, i + 1) for i in range(n - 1)])
        for g in (star, path):
            assert count_mec(g, closed_forms=False) == n

    def test_single_vertex(self):
        assert count_mec(MixedGraph.undirected(1, [])) == 1


class TestClosedForms:
    @pytest.mark.parametrize("p", range(2, 8))
    def test_against_enumeration(self, p):
        full = p * (p - 1) // 2
        for m in sorted({p - 1, p, full - 2, full - 1, full}):
            if m < p - 1 or m > full:
                continue
            want = closed_form_size(p, m)
            assert want is not None
            for seed in range(6):
                try:
                    g = random_chordal(p, m, seed)
                except ValueError:
                    continue
                assert brute_force_mec_size(g) == want, (p, m, seed)
                assert count_mec(g, closed_forms=False) == want

    def test_complete(self):
        assert [closed_form_size(p, p * (p - 1) // 2) for p in range(1, 6)] == [factorial(p) for p in range(1, 6)]

    def test_no_special_case(self):
        assert closed_form_size(6, 8) is None


class TestCounting:
    @given(uccgs(1, 8))
    def test_equals_enumeration(self, g):
        want = n_members(g)
        assert count_mec(g) == want
        assert brute_force_mec_size(g) == want

    @settings(max_examples=40)
    @given(uccgs(1, 10))
    def test_variants_agree(self, g):
        ref = count_mec(g)
        assert count_mec(g, closed_forms=False) == ref
        assert count_mec(g, use_memo=False) == ref
        assert count_mec(g, closed_forms=False, use_memo=False) == ref
        assert count_mec(g, conventional_root=True) == ref

    def test_memo_reused(self):
        g = random_chordal(14, 40, 2)
        stats = MecStats()
        memo = {}
        a = count_mec(g, memo, closed_forms=False, stats=stats)
        assert stats.memo_hits > 0 and stats.tables_built > 0
        again = MecStats()
        assert count_mec(g, memo, closed_forms=False, stats=again) == a
        assert again.memo_hits == 1 and again.tables_built == 0

    def test_memo_off_counts_more_calls(self):
        g = random_chordal(12, 30, 4)
        on, off = MecStats(), MecStats()
        assert count_mec(g, closed_forms=False, stats=on) == count_mec(g, closed_forms=False, use_memo=False, stats=off)
        assert off.memo_hits == 0 and off.calls >= on.calls

    def test_shared_table(self, five):
        t = DpTable(five.graph)
        assert count_mec(five.graph, table=t, closed_forms=False) == 12
        assert t.computed > 0


class TestErrors:
    def test_brute_force_cap(self):
        g = MixedGraph.undirected(10, [(i, i + 1) for i in range(9)])
        with pytest.raises(ValueError):
            brute_force_mec_size(g)
        assert brute_force_mec_size(g, cap=10) == 10

    @pytest.mark.parametrize(
        "g",
        [
            MixedGraph.undirected(3, [(0, 1)]),
            MixedGraph.undirected(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
        ],
    )
    def test_rejects_non_uccg(self, g):
        with pytest.raises(ValueError):
            count_mec(g)

    def test_rejects_directed(self):
        with pytest.raises(ValueError):
            count_mec(MixedGraph(2, [arc(0, 1)]))
