import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cold import meek
from cold.design import (
    POLICIES,
    active_learning_run,
    admissible_ingoing_sets,
    lower_bound_clique,
    lower_bound_node,
    minmax_scan,
    minmax_true_worst,
    random_truth_dag,
    select_lb_node,
    select_minmax_node,
)
from cold.dp import DpTable, i_essential_after_intervention
from cold.graph import Edge, MixedGraph, arc, directed_part, maximal_cliques_in_neighborhood
from conftest import rngs, uccgs
from oracles import common_arcs, extensions, sample_uccg


def clique_subsets(g, v):
    """Every clique inside neigh(v), found by brute force."""
    nb = sorted(g.neighbors(v))
    for r in range(len(nb) + 1):
        for c in combinations(nb, r):
            if all(g.adjacent(a, b) for a, b in combinations(c, 2)):
                yield frozenset(c)


def star_graph(g, v, ins):
    es = []
    for e in g.edges:
        if v in (e.tail, e.head):
            o = e.head if e.tail == v else e.tail
            es.append(arc(o, v) if o in ins else arc(v, o))
        else:
            es.append(e)
    return MixedGraph(g.n, es)


def outcome_by_members(g, v, ins):
    return len(common_arcs(list(extensions(star_graph(g, v, ins), set()))))


def outcome_by_closure(g, v, ins):
    return len(directed_part(meek.meek_closure(star_graph(g, v, ins).edges, meek.M124)))


def worst_case(g, v, outcome=outcome_by_closure):
    return min(outcome(g, v, ins) for ins in clique_subsets(g, v))


class TestExamples:
    def test_single_edge(self):
        g = MixedGraph.undirected(2, [(0, 1)])
        assert select_minmax_node(g) == (0, 1)
        assert select_lb_node(g) == (0, 1)

    def test_path(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2)])
        assert minmax_true_worst(g, 0) == 1
        assert minmax_true_worst(g, 1) == 2
        assert select_minmax_node(g) == (1, 2)
        assert select_lb_node(g) == (1, 2)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_star(self, k):
        g = MixedGraph.undirected(k + 1, [(0, i) for i in range(1, k + 1)])
        assert select_minmax_node(g) == (0, k)
        assert minmax_true_worst(g, 1) == 1

    def test_triangle_tie_goes_to_lowest_id(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2), (0, 2)])
        assert [minmax_true_worst(g, v) for v in range(3)] == [2, 2, 2]
        assert select_minmax_node(g) == (0, 2)
        assert select_lb_node(g)[0] == 0

    def test_triangle_clique_bound(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2), (0, 2)])
        parts = lower_bound_clique(g, {1, 2}, 0, DpTable(g))
        # I = {} or {1, 2} leaves 1 -- 2 undirected
        assert worst_case(g, 0, outcome_by_members) == 2
        assert parts.L_I == 2 and parts.L_C == 3
        assert parts.bound == 2

    def test_singleton_clique_has_no_split_term(self):
        g = MixedGraph.undirected(3, [(0, 1), (1, 2)])
        parts = lower_bound_clique(g, {0}, 1, DpTable(g))
        assert parts.L_C is None and parts.bound == parts.L_I == 2

    def test_reference_graph(self, five):
        g = five.graph
        t = DpTable(g)
        v3 = five.lookup("v3")
        for c in maximal_cliques_in_neighborhood(g, v3):
            b = lower_bound_clique(g, c, v3, t).bound
            assert b <= min(outcome_by_members(g, v3, s) for s in clique_subsets(g, v3) if s and s <= c)
        v, score = select_minmax_node(g, t)
        assert score == max(worst_case(g, u) for u in g.vertices)
        assert worst_case(g, v) == score

    def test_not_a_maximal_clique(self, five):
        g = five.graph
        v = five.lookup
        with pytest.raises(ValueError):
            lower_bound_clique(g, {v("v2")}, v("v3"), DpTable(g))

    def test_admissible_sets_deduplicated(self):
        # two maximal cliques of neigh(0) share vertex 2
        g = MixedGraph.undirected(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)])
        sets = admissible_ingoing_sets(g, 0)
        assert sets[0] == frozenset()
        assert len(sets) == len(set(sets))
        assert set(sets) == set(clique_subsets(g, 0))

    def test_empty_graph(self):
        with pytest.raises(ValueError):
            select_minmax_node(MixedGraph(0, []))
        with pytest.raises(ValueError):
            select_lb_node(MixedGraph(0, []))


class TestScores:
    @given(uccgs(1, 8))
    def test_minmax_matches_member_enumeration(self, g):
        t = DpTable(g)
        for v in g.vertices:
            assert minmax_true_worst(g, v, t) == worst_case(g, v, outcome_by_members)

    @settings(max_examples=30)
    @given(uccgs(1, 12))
    def test_scan_matches_conventional_closure(self, g):
        t = DpTable(g)
        for v in g.vertices:
            assert set(admissible_ingoing_sets(g, v)) == set(clique_subsets(g, v))
            assert minmax_true_worst(g, v, t) == minmax_true_worst(g, v, conventional=True) == worst_case(g, v)

    @given(uccgs(1, 12))
    def test_lower_bound_sound(self, g):
        t = DpTable(g)
        for v in g.vertices:
            true = minmax_true_worst(g, v, t)
            assert lower_bound_node(g, v, t).lower_bound <= true
            for c in maximal_cliques_in_neighborhood(g, v):
                constrained = min(len(i_essential_after_intervention(g, v, s, t)) for s in clique_subsets(g, v) if s and s <= c)
                assert lower_bound_clique(g, c, v, t).bound <= constrained

    @settings(max_examples=25)
    @given(uccgs(1, 12))
    def test_selection_invariances(self, g):
        t = DpTable(g)
        full = select_minmax_node(g, t)
        assert select_minmax_node(g, t, early_stop=True) == full
        assert select_minmax_node(g, conventional=True) == full
        assert select_minmax_node(g, DpTable(g), early_stop=True, conventional=False) == full

    @given(uccgs(2, 10))
    def test_early_stop_value_is_upper_bound(self, g):
        t = DpTable(g)
        for v in g.vertices:
            true = minmax_true_worst(g, v, t)
            for budget in range(true + 2):
                val, truncated = minmax_scan(g, v, t, budget)
                if truncated:
                    assert val <= budget and val >= true
                else:
                    assert val == true


def path_dag(n):
    return MixedGraph(n, [arc(i, i + 1) for i in range(n - 1)])


class TestActiveLearning:
    @pytest.mark.parametrize("policy", POLICIES)
    def test_single_edge(self, policy):
        run = active_learning_run(MixedGraph(2, [arc(1, 0)]), policy, seed=3)
        assert run.interventions == 1 and run.trace == [1]

    @pytest.mark.parametrize("policy", ["MinMax", "MinMaxPT", "LB"])
    def test_path_needs_one(self, policy):
        run = active_learning_run(path_dag(3), policy)
        assert run.targets == [1] and run.trace == [2]

    @given(st.data())
    def test_terminates_and_traces(self, data):
        rng = data.draw(rngs())
        g = sample_uccg(rng, 1, 10)
        truth = random_truth_dag(g, rng)
        for policy in POLICIES:
            run = active_learning_run(truth, policy, seed=rng.randrange(1000))
            assert run.trace[-1:] == ([g.num_edges] if g.edges else [])
            if policy != "RandomNaive":
                assert run.interventions <= max(1, len(g.vertices))
                assert all(a < b for a, b in zip(run.trace, run.trace[1:]))
            else:
                assert all(a <= b for a, b in zip(run.trace, run.trace[1:]))

    def test_deterministic(self):
        g = sample_uccg(random.Random(8), 10, 10)
        truth = random_truth_dag(g, random.Random(1))
        for policy in POLICIES:
            assert active_learning_run(truth, policy, seed=4) == active_learning_run(truth, policy, seed=4)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            active_learning_run(MixedGraph(3, [arc(0, 1), arc(2, 1)]), "MinMax")
        with pytest.raises(ValueError):
            active_learning_run(MixedGraph(3, [arc(0, 1), arc(1, 2), arc(2, 0)]), "MinMax")
        with pytest.raises(ValueError):
            active_learning_run(MixedGraph(2, [Edge(0, 1, False)]), "MinMax")
        with pytest.raises(ValueError):
            active_learning_run(path_dag(3), "Greedy")
        with pytest.raises(RuntimeError):
            active_learning_run(path_dag(5), "RandomNaive", seed=0, max_steps=0)
