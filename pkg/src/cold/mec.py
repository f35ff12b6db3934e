"""Markov-equivalence-class size of a UCCG.

The count sums, over every choice of root vertex, the product of the sizes
of the chain components left after the root's outgoing star is propagated.
Propagation uses the orientation table of the current sub-UCCG; sub-UCCG
sizes are memoised by vertex set and a handful of edge-count special cases
are answered in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Optional

from . import meek
from .dp import DpTable
from .graph import MixedGraph, arc, is_chordal, line

__all__ = ["SizeMemo", "MecStats", "count_mec", "brute_force_mec_size", "closed_form_size"]

SizeMemo = dict  # tuple of sorted vertex ids -> int


@dataclass
class MecStats:
    calls: int = 0
    memo_hits: int = 0
    closed_form_hits: int = 0
    tables_built: int = 0


def closed_form_size(p: int, m: int) -> Optional[int]:
    """Size of a UCCG with ``p`` vertices and ``m`` edges when one of the special cases applies."""
    full = p * (p - 1) // 2
    if m == p - 1:
        return p
    if m == p:
        return 2 * p
    if m == full - 2 and p >= 3:
        return (p * p - p - 4) * factorial(p - 3)
    if m == full - 1 and p >= 2:
        return 2 * factorial(p - 1) - factorial(p - 2)
    if m == full:
        return factorial(p)
    return None


def _components(vertices, adj: dict[int, set[int]]) -> list[frozenset[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(vertices):
        if s in seen or not adj[s]:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


def count_mec(
    g: MixedGraph,
    memo: Optional[SizeMemo] = None,
    table: Optional[DpTable] = None,
    *,
    closed_forms: bool = True,
    conventional_root: bool = False,
    use_memo: bool = True,
    stats: Optional[MecStats] = None,
) -> int:
    if not g.is_undirected():
        raise ValueError("count_mec expects an undirected graph")
    if not g.is_connected():
        raise ValueError("count_mec expects a connected graph")
    if not is_chordal(g):
        raise ValueError("count_mec expects a chordal graph")
    if memo is None:
        memo = {}
    if stats is None:
        stats = MecStats()
    if table is not None:
        table.check_graph(g)
    ambient = {v: set(g.neighbors(v)) for v in g.vertices}

    def count(vs: frozenset[int], tbl: Optional[DpTable]) -> int:
        stats.calls += 1
        p = len(vs)
        nbrs = {v: ambient[v] & vs for v in vs}
        m = sum(len(s) for s in nbrs.values()) // 2
        if closed_forms:
            c = closed_form_size(p, m)
            if c is not None:
                stats.closed_form_hits += 1
                return c
        key = tuple(sorted(vs))
        if use_memo and key in memo:
            stats.memo_hits += 1
            return memo[key]
        sub = None
        if not conventional_root and tbl is None:
            sub = MixedGraph(g.n, (line(a, b) for a in vs for b in nbrs[a] if a < b), vs)
            tbl = DpTable(sub)
            stats.tables_built += 1
        total = 0
        for v in sorted(vs):
            if conventional_root:
                if sub is None:
                    sub = MixedGraph(g.n, (line(a, b) for a in vs for b in nbrs[a] if a < b), vs)
                star = [arc(v, o) for o in nbrs[v]]
                closed = meek.meek_closure(
                    [e for e in sub.edges if v not in (e.tail, e.head)] + star, meek.M124
                )
                oriented = {e.pair for e in closed if e.directed}
            else:
                oriented = set()
                for o in nbrs[v]:
                    for e in tbl.fill(v, o):
                        oriented.add(e.pair)
            rest = {x: {y for y in nbrs[x] if (min(x, y), max(x, y)) not in oriented} for x in vs}
            prod = 1
            for comp in _components(vs, rest):
                prod *= count(comp, None)
            total += prod
        if use_memo:
            memo[key] = total
        return total

    return count(frozenset(g.vertices), table)


def brute_force_mec_size(g: MixedGraph, cap: int = 9) -> int:
    """Count acyclic, v-structure-free orientations of the skeleton by backtracking."""
    if len(g.vertices) > cap:
        raise ValueError(f"brute force capped at {cap} vertices, got {len(g.vertices)}")
    pairs = sorted(e.pair for e in g.edges)
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    parents: dict[int, set[int]] = {v: set() for v in g.vertices}
    children: dict[int, set[int]] = {v: set() for v in g.vertices}

    def reaches(src: int, dst: int) -> bool:
        stack = [src]
        seen = {src}
        while stack:
            x = stack.pop()
            if x == dst:
                return True
            for y in children[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def ok(u: int, v: int) -> bool:
        # u -> v: no unshielded collider at v, no cycle
        if any(p not in adj[u] for p in parents[v]):
            return False
        return not reaches(v, u)

    def rec(i: int) -> int:
        if i == len(pairs):
            return 1
        a, b = pairs[i]
        total = 0
        for u, v in ((a, b), (b, a)):
            if ok(u, v):
                parents[v].add(u)
                children[u].add(v)
                total += rec(i + 1)
                parents[v].discard(u)
                children[u].discard(v)
        return total

    return rec(0)
