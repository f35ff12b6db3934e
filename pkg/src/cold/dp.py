"""Orientation tables caching single-edge closures over a fixed skeleton.

``DpTable[s, d]`` is the set of edges oriented by rules 1 and 4 once the one
edge ``s -> d`` is fixed on an otherwise undirected chordal skeleton. The
table is filled by the column recursion of the orientation DP: an entry is
``{s -> d}`` plus the entries of every edge that rule 1 (``d -> j``) or rule
4 (``i -> j``) orients next to ``d``. ``DpoTable`` is the rule-1-only
variant that refuses to reverse fixed v-structure edges.

Entries are filled on demand; ``build()`` fills everything. Recursion runs
on an explicit stack.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import meek
from .graph import (
    Edge,
    MixedGraph,
    arc,
    directed_part,
    is_chordal,
    maximal_cliques_in_neighborhood,
    mixed_union,
    skeleton,
    v_structures,
)

__all__ = [
    "StaleTableError",
    "DpTable",
    "DpoTable",
    "InterventionOutcome",
    "orient_one_edge",
    "build_dp_table",
    "dpo_orient_one_edge",
    "apply_m14_iccg",
    "m124_iccg",
    "i_essential_after_intervention",
    "essential_from_mpdag",
    "essential_edges_from_mpdag",
    "iccg_star",
]


class StaleTableError(ValueError):
    """The table was built for a different skeleton."""


def _key(edge) -> tuple[int, int]:
    if isinstance(edge, Edge):
        if not edge.directed:
            raise ValueError("DP entries are indexed by directed edges")
        return edge.tail, edge.head
    s, d = edge
    return int(s), int(d)


def _render(e: Edge, label: Callable[[int], str]) -> str:
    return f"{label(e.tail)}->{label(e.head)}"


class _Table:
    """Shared machinery: lazy entries keyed by ordered pair, explicit-stack fill."""

    def __init__(self, g: MixedGraph):
        self.n = g.n
        self.vertices = g.vertices
        self._graph = g
        self._fingerprint: Optional[str] = None
        self.nbrs: dict[int, frozenset[int]] = {v: frozenset(g.neighbors(v)) for v in g.vertices}
        self.entries: dict[tuple[int, int], frozenset[Edge]] = {}
        self.computed = 0
        self.probes = 0
        self._lock = threading.Lock()

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            self._fingerprint = self._graph.fingerprint()
            self._graph = None
        return self._fingerprint

    def check_graph(self, g: MixedGraph) -> None:
        if g is self._graph:
            return
        if g.fingerprint() != self.fingerprint:
            raise StaleTableError("table was built for a different skeleton")

    def _deps(self, s: int, d: int) -> list[tuple[int, int]]:
        raise NotImplementedError

    def is_filled(self, s: int, d: int) -> bool:
        return (s, d) in self.entries

    def fill(self, s: int, d: int) -> frozenset[Edge]:
        if d not in self.nbrs.get(s, ()):
            raise ValueError(f"{s} and {d} are not adjacent in the skeleton")
        got = self.entries.get((s, d))
        if got is not None:
            return got
        with self._lock:
            return self._fill_locked(s, d)

    def _fill_locked(self, s: int, d: int) -> frozenset[Edge]:
        entries = self.entries
        if (s, d) in entries:
            return entries[(s, d)]
        active = {(s, d)}
        stack = [((s, d), self._deps(s, d))]
        while stack:
            key, deps = stack[-1]
            pending = None
            for dep in deps:
                if dep not in entries:
                    pending = dep
                    break
            if pending is not None:
                if pending in active:
                    # a call cycle would contradict the directed-path argument
                    raise RuntimeError(f"recursive dependency on {pending} while filling {key}")
                active.add(pending)
                stack.append((pending, self._deps(*pending)))
                continue
            acc = {Edge(key[0], key[1], True)}
            for dep in deps:
                acc |= entries[dep]
            entries[key] = frozenset(acc)
            self.computed += 1
            active.discard(key)
            stack.pop()
        return entries[(s, d)]

    def __getitem__(self, edge) -> frozenset[Edge]:
        s, d = _key(edge)
        return self.fill(s, d)

    def __contains__(self, edge) -> bool:
        s, d = _key(edge)
        return (s, d) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self):
        return self.entries.keys()

    def build(self):
        for s in sorted(self.nbrs):
            for d in sorted(self.nbrs[s]):
                self.fill(s, d)
        return self

    def union(self, edges: Iterable) -> frozenset[Edge]:
        out: set[Edge] = set()
        for e in edges:
            out |= self[e]
        return frozenset(out)

    def dump(self, label: Callable[[int], str] = str) -> str:
        """One line per filled entry, ``s->d : {a->b, ...}``, sorted."""
        lines = []
        for s, d in sorted(self.entries):
            body = ", ".join(_render(e, label) for e in sorted(self.entries[(s, d)]))
            lines.append(f"{label(s)}->{label(d)} : {{{body}}}")
        return "\n".join(lines) + ("\n" if lines else "")


class DpTable(_Table):
    """Rule-1/rule-4 closure of each single directed edge over a UCCG skeleton."""

    def __init__(self, g: MixedGraph, *, check_chordal: bool = False):
        if check_chordal:
            skel = g if g.is_undirected() else g.skeleton()
            if not is_chordal(skel):
                raise ValueError("DP tables need a chordal skeleton")
        super().__init__(g)

    def _deps(self, s: int, d: int) -> list[tuple[int, int]]:
        nbrs = self.nbrs
        ns, nd = nbrs[s], nbrs[d]
        deps = []
        for j in sorted(nd - ns):
            if j == s:
                continue
            deps.append((d, j))
            common = ns & nd & nbrs[j]
            self.probes += 1 + len(common)
            for i in sorted(common):
                deps.append((i, j))
        return deps


class DpoTable(_Table):
    """Rule-1-only variant that never orients ``d -> j`` against a fixed ``j -> d``."""

    def __init__(self, g: MixedGraph, vstructure_edges: Optional[Iterable] = None):
        super().__init__(g)
        if vstructure_edges is None:
            vs = v_structures(g.edges)
            vstructure_edges = {arc(i, k) for i, k, j in vs} | {arc(j, k) for i, k, j in vs}
        self.vstructure_edges = frozenset((e.tail, e.head) if isinstance(e, Edge) else tuple(e) for e in vstructure_edges)

    def _deps(self, s: int, d: int) -> list[tuple[int, int]]:
        nbrs = self.nbrs
        deps = []
        for j in sorted(nbrs[d] - nbrs[s]):
            if j == s:
                continue
            self.probes += 1
            if (j, d) not in self.vstructure_edges:
                deps.append((d, j))
        return deps


def orient_one_edge(g: MixedGraph, s: int, d: int, table: Optional[DpTable] = None) -> DpTable:
    """Fill ``table[s -> d]`` (and whatever the recursion touches)."""
    if table is None:
        table = DpTable(g)
    else:
        table.check_graph(g)
    if table.is_filled(s, d):
        raise ValueError(f"entry {s}->{d} is already filled")
    table.fill(s, d)
    return table


def build_dp_table(g: MixedGraph) -> DpTable:
    if not g.is_undirected():
        raise ValueError("build_dp_table expects an undirected graph")
    if not g.is_connected():
        raise ValueError("build_dp_table expects a connected graph")
    return DpTable(g, check_chordal=True).build()


def dpo_orient_one_edge(g: MixedGraph, s: int, d: int, table: Optional[DpoTable] = None) -> DpoTable:
    if table is None:
        table = DpoTable(g)
    else:
        table.check_graph(g)
    if (d, s) in table.vstructure_edges:
        raise ValueError(f"{s}->{d} reverses a v-structure edge")
    table.fill(s, d)
    return table


@dataclass(frozen=True)
class InterventionOutcome:
    v: int
    ingoing: frozenset[int]
    outgoing: frozenset[int]
    oriented: frozenset[Edge] = field(repr=False)

    def __len__(self) -> int:
        return len(self.oriented)


def iccg_star(g: MixedGraph) -> tuple[int, frozenset[int], frozenset[int]]:
    """Recover ``(v, I, O)`` from an ICCG's directed star."""
    d = g.directed_edges
    if not d:
        raise ValueError("an ICCG has a nonempty directed part")
    for v in sorted(g.vertices):
        star = {e for e in d if v in (e.tail, e.head)}
        if star == set(d) and len(star) == len(g.neighbors(v)):
            ins = frozenset(e.tail for e in star if e.head == v)
            outs = frozenset(e.head for e in star if e.tail == v)
            return v, ins, outs
    raise ValueError("directed part is not the full star of a single vertex")


def _admissible_ingoing(g: MixedGraph, v: int, ingoing: frozenset[int]) -> None:
    if not ingoing <= g.neighbors(v):
        raise ValueError(f"ingoing set {sorted(ingoing)} is not inside neigh({v})")
    if ingoing and not any(ingoing <= c for c in maximal_cliques_in_neighborhood(g, v)):
        raise ValueError(f"ingoing set {sorted(ingoing)} is not within one maximal clique of neigh({v})")


def _intervention_core(nbrs, v: int, ingoing: frozenset[int], table: DpTable) -> tuple[set, list, list]:
    outgoing = nbrs[v] - ingoing
    vc = [o for o in sorted(outgoing) if ingoing <= nbrs[o]]
    sprime = [(i, v) for i in sorted(ingoing)] + [(v, o) for o in vc]
    acc: set[Edge] = set()
    for s, d in sprime:
        acc |= table.fill(s, d)
    return acc, vc, sprime


def apply_m14_iccg(g: MixedGraph, table: DpTable) -> frozenset[Edge]:
    """Union of the table entries of the reduced star ``S'`` of an ICCG."""
    v, ins, _ = iccg_star(g)
    table.check_graph(g.skeleton())
    acc, _, _ = _intervention_core(table.nbrs, v, ins, table)
    return frozenset(acc)


def m124_iccg(g: MixedGraph, table: Optional[DpTable] = None, *, local: bool = True) -> frozenset[Edge]:
    """Directed part of the rule-1/2/4 closure of an ICCG: table union, then rule 2.

    With ``local`` the rule-2 sweep only looks at edges among ``v`` and its
    neighbours; ``local=False`` sweeps the whole graph.
    """
    v, ins, _ = iccg_star(g)
    skel = g.skeleton()
    if table is None:
        table = DpTable(skel)
    else:
        table.check_graph(skel)
    base, _, _ = _intervention_core(table.nbrs, v, ins, table)
    work = mixed_union(mixed_union(base, g.edges), skel.edges)
    if local:
        zone = table.nbrs[v] | {v}
        inside = [e for e in work if e.tail in zone and e.head in zone]
        swept = meek.meek_closure(inside, meek.M12 - {meek.Rule.R1})
        out = set(base) | {e for e in swept if e.directed}
    else:
        out = {e for e in meek.meek_closure(work, frozenset({meek.Rule.R2})) if e.directed}
    return frozenset(out)


def i_essential_after_intervention(
    g: MixedGraph,
    v: int,
    ingoing: Iterable[int] = (),
    table: Optional[DpTable] = None,
    *,
    conventional: bool = False,
    validate: bool = True,
) -> InterventionOutcome:
    """Edges oriented after a perfect intervention on ``v`` revealing parents ``ingoing``.

    With ``conventional=True`` the result comes from the fixpoint engine
    (rules 1, 2, 4) instead of the table.
    """
    ins = frozenset(ingoing)
    if v not in g.vertices:
        raise ValueError(f"vertex {v} not in graph")
    if validate:
        _admissible_ingoing(g, v, ins)
    nb = g.neighbors(v)
    outs = frozenset(nb - ins)
    if conventional:
        star = [arc(i, v) for i in ins] + [arc(v, o) for o in outs]
        closed = meek.meek_closure(mixed_union(star, skeleton(g.edges)), meek.M124)
        return InterventionOutcome(v, ins, outs, directed_part(closed))
    if table is None:
        table = DpTable(g)
    elif validate:
        table.check_graph(g)
    acc, vc, _ = _intervention_core(table.nbrs, v, ins, table)
    for i in ins:
        for o in vc:
            acc.add(Edge(i, o, True))
    return InterventionOutcome(v, ins, outs, frozenset(acc))


def _r2_sweep(st, seeds: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Close under rule 2 given that only the ``seeds`` arcs are new."""
    queue = list(seeds)
    added = []
    while queue:
        x, y = queue.pop()
        found = [(x, z) for z in st.chi[y] if z in st.und[x]]
        found += [(w, y) for w in st.par[x] if w in st.und[y]]
        for a, b in found:
            if b not in st.und[a]:
                continue
            if st.chi[b] & st.par[a]:
                raise meek.ConflictError(Edge(a, b, False), (f"rule 2 forces both {a}->{b} and {b}->{a}",))
            st.orient(a, b)
            added.append((a, b))
            queue.append((a, b))
    return added


def essential_edges_from_mpdag(g: MixedGraph, table: Optional[DpoTable] = None) -> frozenset[Edge]:
    """Edge set of :func:`essential_from_mpdag`."""
    if table is None:
        # in an MPDAG the directed edges are exactly the v-structure edges
        table = DpoTable(g, vstructure_edges=g.directed_edges)
    else:
        table.check_graph(g)
    st = meek._State(g.edges)
    meek._close_worklist(st, frozenset({meek.Rule.R3}), None, None)
    frontier = sorted((u, v) for u, cs in st.chi.items() for v in cs)
    while frontier:
        fresh = list(frontier)
        for s, d in frontier:
            for e in table.fill(s, d):
                a, b = e.tail, e.head
                if b in st.und[a]:
                    st.orient(a, b)
                    fresh.append((a, b))
                elif a in st.chi[b]:
                    raise meek.ConflictError(e, (f"table entry of {s}->{d} reverses {b}->{a}",))
        frontier = _r2_sweep(st, fresh)
    return st.edges()


def essential_from_mpdag(g: MixedGraph, table: Optional[DpoTable] = None) -> MixedGraph:
    """Essential graph from an MPDAG: rule 3 once, then table-driven rule 1 and rule-2 sweeps."""
    return MixedGraph(g.n, essential_edges_from_mpdag(g, table), g.vertices)
