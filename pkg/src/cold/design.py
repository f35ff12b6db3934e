"""Single-vertex intervention design on a UCCG.

MinMax picks the vertex whose worst-case intervention outcome orients the
most edges; LB replaces the exact worst case by a table-only lower bound.
Both reuse one orientation table across every candidate vertex and every
admissible parent set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .dp import DpTable, i_essential_after_intervention
from .graph import (
    Edge,
    MixedGraph,
    chain_components,
    has_directed_cycle,
    is_chordal,
    lexbfs_order,
    line,
    maximal_cliques_in_neighborhood,
    orient_by_ordering,
    v_structures,
)

__all__ = [
    "CliqueLowerBoundParts",
    "NodeScore",
    "ActiveRun",
    "POLICIES",
    "admissible_ingoing_sets",
    "minmax_scan",
    "minmax_true_worst",
    "select_minmax_node",
    "lower_bound_clique",
    "lower_bound_node",
    "select_lb_node",
    "active_learning_run",
    "random_truth_dag",
]


@dataclass(frozen=True)
class CliqueLowerBoundParts:
    L_I: int
    R: frozenset[Edge] = field(repr=False)
    P: tuple[int, ...]
    Q: tuple[int, ...]
    L_C: Optional[int]

    @property
    def bound(self) -> int:
        return self.L_I if self.L_C is None else min(self.L_I, self.L_C)


@dataclass(frozen=True)
class NodeScore:
    v: int
    lower_bound: int
    worst_case_true: Optional[int] = None


def admissible_ingoing_sets(g: MixedGraph, v: int) -> list[frozenset[int]]:
    """The empty set, then every nonempty subset of every maximal clique of ``neigh(v)``, deduplicated."""
    out = [frozenset()]
    seen = {frozenset()}
    for clique in maximal_cliques_in_neighborhood(g, v):
        members = sorted(clique)
        for r in range(1, len(members) + 1):
            for combo in combinations(members, r):
                s = frozenset(combo)
                if s not in seen:
                    seen.add(s)
                    out.append(s)
    return out


def minmax_scan(
    g: MixedGraph,
    v: int,
    table: Optional[DpTable] = None,
    budget: Optional[int] = None,
    *,
    conventional: bool = False,
) -> tuple[int, bool]:
    """Worst-case number of oriented edges for an intervention on ``v``.

    Returns ``(value, truncated)``. With a ``budget`` the scan stops as soon as
    the running minimum is ``<= budget``; the value is then only an upper
    bound on the true worst case.
    """
    if table is None and not conventional:
        table = DpTable(g)
    best = None
    for ins in admissible_ingoing_sets(g, v):
        out = i_essential_after_intervention(g, v, ins, table, conventional=conventional, validate=False)
        k = len(out.oriented)
        if best is None or k < best:
            best = k
            if budget is not None and best <= budget:
                return best, True
    return (0 if best is None else best), False


def minmax_true_worst(
    g: MixedGraph,
    v: int,
    table: Optional[DpTable] = None,
    budget: Optional[int] = None,
    *,
    conventional: bool = False,
) -> int:
    return minmax_scan(g, v, table, budget, conventional=conventional)[0]


def select_minmax_node(
    g: MixedGraph,
    table: Optional[DpTable] = None,
    early_stop: bool = False,
    *,
    conventional: bool = False,
) -> tuple[int, int]:
    """``argmax_v`` of the worst case; lowest id wins ties."""
    if not g.vertices:
        raise ValueError("empty graph")
    if table is None and not conventional:
        table = DpTable(g)
    best_v, best = None, -1
    for v in sorted(g.vertices):
        budget = best if (early_stop and best_v is not None) else None
        val, truncated = minmax_scan(g, v, table, budget, conventional=conventional)
        if not truncated and val > best:
            best_v, best = v, val
    return best_v, best


def lower_bound_clique(g: MixedGraph, clique, v: int, table: DpTable) -> CliqueLowerBoundParts:
    ck = frozenset(clique)
    nb = table.nbrs[v]
    if not any(ck == c for c in maximal_cliques_in_neighborhood(g, v)):
        raise ValueError(f"{sorted(ck)} is not a maximal clique of neigh({v})")
    members = sorted(ck)
    size = len(members)
    l_i = len(table.union((u, v) for u in members))
    outside = sorted(nb - ck)
    r = table.union((v, o) for o in outside)
    p, q = [], []
    for u in members:
        extra = {Edge(u, o, True) for o in table.nbrs[u] & nb if o not in ck}
        p.append(len((table[u, v] | extra) - r))
        q.append(len(table[v, u] - r))
    p.sort()
    q.sort()
    l_c = None
    if size >= 2:
        l_c = len(r) + min(p[l - 1] + q[size - l - 1] + l * (size - l) for l in range(1, size)) + (size - 2)
    return CliqueLowerBoundParts(l_i, r, tuple(p), tuple(q), l_c)


def lower_bound_node(g: MixedGraph, v: int, table: Optional[DpTable] = None) -> NodeScore:
    if table is None:
        table = DpTable(g)
    nb = table.nbrs[v]
    bound = len(table.union((v, o) for o in nb))
    for c in maximal_cliques_in_neighborhood(g, v):
        bound = min(bound, lower_bound_clique(g, c, v, table).bound)
    return NodeScore(v, bound)


def select_lb_node(g: MixedGraph, table: Optional[DpTable] = None) -> tuple[int, int]:
    if not g.vertices:
        raise ValueError("empty graph")
    if table is None:
        table = DpTable(g)
    best_v, best = None, -1
    for v in sorted(g.vertices):
        s = lower_bound_node(g, v, table).lower_bound
        if s > best:
            best_v, best = v, s
    return best_v, best


POLICIES = ("MinMax", "MinMaxPT", "LB", "RandomNaive", "RandomChordal")


def _policy(name: str) -> str:
    for p in POLICIES:
        if p.lower() == name.lower():
            return p
    raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}")


@dataclass
class ActiveRun:
    policy: str
    seed: int
    targets: list[int]
    trace: list[int]

    @property
    def interventions(self) -> int:
        return len(self.targets)


def random_truth_dag(g: MixedGraph, rng: random.Random) -> MixedGraph:
    """A v-structure-free DAG on the UCCG ``g`` via randomised LexBFS."""
    return orient_by_ordering(g, lexbfs_order(g, rng=rng))


def _largest(comps: list[MixedGraph]) -> MixedGraph:
    return max(comps, key=lambda c: (len(c.vertices), len(c.edges), -min(c.vertices)))


def active_learning_run(truth: MixedGraph, policy: str, seed: int = 0, max_steps: Optional[int] = None) -> ActiveRun:
    """Intervene one vertex at a time until every edge of ``truth`` is oriented."""
    policy = _policy(policy)
    if not truth.is_fully_directed() or has_directed_cycle(truth.edges):
        raise ValueError("truth must be a DAG")
    if v_structures(truth.edges):
        raise ValueError("truth must have no v-structures")
    skel = truth.skeleton()
    if not (skel.is_connected() and is_chordal(skel)):
        raise ValueError("truth skeleton must be a UCCG")
    rng = random.Random(seed)
    truth_set = truth.edges
    oriented: set[Edge] = set()
    pairs = sorted(e.pair for e in truth.edges)
    targets: list[int] = []
    trace: list[int] = []
    cap = max_steps if max_steps is not None else 100 * max(1, len(truth.vertices))

    def current() -> list[Edge]:
        done = {e.pair: e for e in oriented}
        return [done.get(p, line(*p)) for p in pairs]

    while len(oriented) < len(pairs):
        if len(targets) >= cap:
            raise RuntimeError(f"no full identification after {cap} interventions")
        comps = chain_components(MixedGraph(truth.n, current(), truth.vertices))
        table = None
        if policy in ("MinMax", "MinMaxPT", "LB"):
            comp = _largest(comps)
            table = DpTable(comp)
            if policy == "LB":
                v, _ = select_lb_node(comp, table)
            else:
                v, _ = select_minmax_node(comp, table, early_stop=(policy == "MinMaxPT"))
        elif policy == "RandomChordal":
            v = rng.choice(sorted(set().union(*(c.vertices for c in comps))))
            comp = None
        else:
            v = rng.choice(sorted(truth.vertices))
            comp = None
        targets.append(v)
        if comp is None:
            comp = next((c for c in comps if v in c.vertices), None)
        if comp is not None:
            ins = {u for u in comp.neighbors(v) if Edge(u, v, True) in truth_set}
            out = i_essential_after_intervention(comp, v, ins, table, validate=False)
            if not out.oriented <= truth_set:
                raise AssertionError("closure oriented an edge against the truth")
            oriented |= out.oriented
        trace.append(len(oriented))
    return ActiveRun(policy, seed, targets, trace)
