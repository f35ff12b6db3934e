"""Mixed graphs over dense integer vertex ids and the structural helpers
(chordality, LexBFS, chain components, v-structures) the rest of the
package is written against.

Edge sets are plain ``frozenset``\\ s of :class:`Edge`. A directed edge keeps
its orientation; an undirected edge is stored with ``tail < head`` so that
set membership is canonical.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

__all__ = [
    "Edge",
    "arc",
    "line",
    "MixedGraph",
    "GraphClass",
    "mixed_union",
    "has_conflict",
    "skeleton",
    "directed_part",
    "undirected_part",
    "v_structures",
    "chain_components",
    "is_chordal",
    "lexbfs_order",
    "orient_by_ordering",
    "maximal_cliques_in_neighborhood",
    "has_directed_cycle",
    "find_directed_cycle",
    "random_chordal",
    "random_dag",
    "mpdag_of",
    "random_mpdag",
    "shd",
    "classify",
]


class Edge(NamedTuple):
    tail: int
    head: int
    directed: bool = True

    def reversed(self) -> "Edge":
        if not self.directed:
            return self
        return Edge(self.head, self.tail, True)

    @property
    def pair(self) -> tuple[int, int]:
        u, v = self.tail, self.head
        return (u, v) if u < v else (v, u)

    def __str__(self) -> str:
        sym = "->" if self.directed else "--"
        return f"{self.tail} {sym} {self.head}"


def arc(u: int, v: int) -> Edge:
    """Directed edge ``u -> v``."""
    if u == v:
        raise ValueError(f"self-loop on vertex {u}")
    return Edge(u, v, True)


def line(u: int, v: int) -> Edge:
    """Undirected edge ``u -- v`` in canonical (min, max) form."""
    if u == v:
        raise ValueError(f"self-loop on vertex {u}")
    return Edge(u, v, False) if u < v else Edge(v, u, False)


def _normalize(e) -> Edge:
    if isinstance(e, Edge):
        return line(e.tail, e.head) if not e.directed else e
    u, v, *rest = e
    directed = rest[0] if rest else True
    return arc(u, v) if directed else line(u, v)


class GraphClass:
    DAG = "DAG"
    UCCG = "UCCG"
    PCCG = "PCCG"
    ICCG = "ICCG"
    MPDAG = "MPDAG"
    GENERAL = "GeneralPDAG"


class MixedGraph:
    """Vertex set plus a conflict-free mixed edge set.

    ``vertices`` defaults to ``range(n)``; sub-graphs (chain components,
    induced sub-UCCGs) keep the ambient ids and carry a smaller vertex set.
    """

    __slots__ = ("n", "vertices", "edges", "_nbrs", "_parents", "_children", "_undirected", "_fp")

    def __init__(self, n: int, edges: Iterable = (), vertices: Optional[Iterable[int]] = None):
        self.n = int(n)
        self.vertices = frozenset(range(self.n)) if vertices is None else frozenset(vertices)
        es = frozenset(_normalize(e) for e in edges)
        self.edges = es
        self._nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        self._parents: dict[int, set[int]] = {v: set() for v in self.vertices}
        self._children: dict[int, set[int]] = {v: set() for v in self.vertices}
        self._undirected: dict[int, set[int]] = {v: set() for v in self.vertices}
        for e in es:
            u, v = e.tail, e.head
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {e} has an endpoint outside the vertex set")
            if v in self._nbrs[u]:
                raise ValueError(f"more than one edge between {u} and {v}")
            self._nbrs[u].add(v)
            self._nbrs[v].add(u)
            if e.directed:
                self._children[u].add(v)
                self._parents[v].add(u)
            else:
                self._undirected[u].add(v)
                self._undirected[v].add(u)
        self._fp: Optional[str] = None

    # -- construction helpers
    @classmethod
    def undirected(cls, n: int, pairs: Iterable[tuple[int, int]], vertices=None) -> "MixedGraph":
        return cls(n, (line(u, v) for u, v in pairs), vertices)

    @classmethod
    def from_edges(cls, edges: Iterable, n: Optional[int] = None) -> "MixedGraph":
        es = [_normalize(e) for e in edges]
        if n is None:
            n = 1 + max((max(e.tail, e.head) for e in es), default=-1)
        return cls(n, es)

    def induced(self, vertices: Iterable[int]) -> "MixedGraph":
        vs = frozenset(vertices)
        return MixedGraph(self.n, (e for e in self.edges if e.tail in vs and e.head in vs), vs)

    def with_edges(self, edges: Iterable) -> "MixedGraph":
        return MixedGraph(self.n, edges, self.vertices)

    # -- queries
    def neighbors(self, v: int) -> set[int]:
        return self._nbrs[v]

    def parents(self, v: int) -> set[int]:
        return self._parents[v]

    def children(self, v: int) -> set[int]:
        return self._children[v]

    def undirected_neighbors(self, v: int) -> set[int]:
        return self._undirected[v]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._nbrs.get(u, ())

    def has_edge(self, e) -> bool:
        return _normalize(e) in self.edges

    def edge_between(self, u: int, v: int) -> Optional[Edge]:
        if v in self._children.get(u, ()):
            return Edge(u, v, True)
        if u in self._children.get(v, ()):
            return Edge(v, u, True)
        if v in self._undirected.get(u, ()):
            return line(u, v)
        return None

    def degree(self, v: int) -> int:
        return len(self._nbrs[v])

    @property
    def max_degree(self) -> int:
        return max((len(s) for s in self._nbrs.values()), default=0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def directed_edges(self) -> frozenset[Edge]:
        return frozenset(e for e in self.edges if e.directed)

    @property
    def undirected_edges(self) -> frozenset[Edge]:
        return frozenset(e for e in self.edges if not e.directed)

    def is_undirected(self) -> bool:
        return all(not e.directed for e in self.edges)

    def is_fully_directed(self) -> bool:
        return all(e.directed for e in self.edges)

    def skeleton(self) -> "MixedGraph":
        return MixedGraph(self.n, skeleton(self.edges), self.vertices)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = min(self.vertices)
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self._nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def fingerprint(self) -> str:
        """Hash of the skeleton over the vertex set."""
        if self._fp is None:
            h = hashlib.sha1()
            h.update(repr(sorted(self.vertices)).encode())
            h.update(repr(sorted(e.pair for e in self.edges)).encode())
            self._fp = h.hexdigest()
        return self._fp

    def audit(self) -> bool:
        """Rebuild adjacency from ``edges`` and compare with the stored index."""
        fresh = MixedGraph(self.n, self.edges, self.vertices)
        return (
            fresh._nbrs == self._nbrs
            and fresh._parents == self._parents
            and fresh._children == self._children
            and fresh._undirected == self._undirected
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        body = ", ".join(str(e) for e in sorted(self.edges))
        return f"MixedGraph(n={self.n}, |V|={len(self.vertices)}, edges={{{body}}})"


def _edges_of(e) -> frozenset[Edge]:
    if isinstance(e, MixedGraph):
        return e.edges
    return frozenset(_normalize(x) for x in e)


def mixed_union(a: Iterable, b: Iterable) -> frozenset[Edge]:
    """Union that lets a directed edge absorb the undirected edge on its pair."""
    c = _edges_of(a) | _edges_of(b)
    oriented = {e.pair for e in c if e.directed}
    return frozenset(e for e in c if e.directed or e.pair not in oriented)


def has_conflict(e: Iterable) -> bool:
    es = _edges_of(e)
    return any(x.directed and Edge(x.head, x.tail, True) in es for x in es)


def skeleton(e: Iterable) -> frozenset[Edge]:
    return frozenset(line(*x.pair) for x in _edges_of(e))


def directed_part(e: Iterable) -> frozenset[Edge]:
    return frozenset(x for x in _edges_of(e) if x.directed)


def undirected_part(e: Iterable) -> frozenset[Edge]:
    return frozenset(x for x in _edges_of(e) if not x.directed)


def _adjacency(es: Iterable[Edge]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for x in es:
        adj.setdefault(x.tail, set()).add(x.head)
        adj.setdefault(x.head, set()).add(x.tail)
    return adj


def v_structures(e) -> frozenset[tuple[int, int, int]]:
    """All colliders ``i -> k <- j`` with ``i``, ``j`` non-adjacent, as ``(i, k, j)`` with ``i < j``."""
    es = _edges_of(e)
    adj = _adjacency(es)
    parents: dict[int, list[int]] = {}
    for x in es:
        if x.directed:
            parents.setdefault(x.head, []).append(x.tail)
    out = set()
    for k, ps in parents.items():
        ps.sort()
        for a in range(len(ps)):
            for b in range(a + 1, len(ps)):
                i, j = ps[a], ps[b]
                if j not in adj[i]:
                    out.add((i, k, j))
    return frozenset(out)


def chain_components(e) -> list[MixedGraph]:
    """Connected components of the undirected-mark subgraph; isolated vertices are dropped."""
    if isinstance(e, MixedGraph):
        n, es = e.n, e.edges
    else:
        es = _edges_of(e)
        n = 1 + max((max(x.tail, x.head) for x in es), default=-1)
    und = [x for x in es if not x.directed]
    adj = _adjacency(und)
    seen: set[int] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return [MixedGraph(n, (x for x in und if x.tail in c), c) for c in comps]


def _mcs_order(vertices: Iterable[int], nbrs) -> list[int]:
    """Maximum cardinality search; ties to the lowest id."""
    vs = sorted(vertices)
    weight = {v: 0 for v in vs}
    buckets: dict[int, set[int]] = {0: set(vs)}
    order = []
    best = 0
    numbered: set[int] = set()
    while len(order) < len(vs):
        while best >= 0 and not buckets.get(best):
            best -= 1
        v = min(buckets[best])
        buckets[best].discard(v)
        numbered.add(v)
        order.append(v)
        for w in nbrs[v]:
            if w in numbered:
                continue
            buckets[weight[w]].discard(w)
            weight[w] += 1
            buckets.setdefault(weight[w], set()).add(w)
            if weight[w] > best:
                best = weight[w]
    return order


def _is_peo(peo: Sequence[int], nbrs) -> bool:
    pos = {v: i for i, v in enumerate(peo)}
    for v in peo:
        later = [w for w in nbrs[v] if pos[w] > pos[v]]
        if not later:
            continue
        parent = min(later, key=pos.__getitem__)
        rest = set(later)
        rest.discard(parent)
        if not rest <= nbrs[parent]:
            return False
    return True


def is_chordal(g: MixedGraph, return_peo: bool = False):
    """Chordality test on an undirected graph.

    With ``return_peo`` the result is ``(chordal, peo)`` where ``peo`` is a
    perfect elimination ordering (or ``None`` when the graph is not chordal).
    """
    if any(e.directed for e in g.edges):
        raise ValueError("is_chordal expects an undirected graph")
    nbrs = {v: g.neighbors(v) for v in g.vertices}
    order = _mcs_order(g.vertices, nbrs)
    peo = order[::-1]
    ok = _is_peo(peo, nbrs)
    if return_peo:
        return ok, (peo if ok else None)
    return ok


def lexbfs_order(g: MixedGraph, start: Optional[int] = None, rng: Optional[random.Random] = None) -> list[int]:
    """Lexicographic BFS by partition refinement.

    Ties go to the lowest vertex id unless ``rng`` is given, in which case
    they are broken uniformly at random (used for sampling truth DAGs).
    """
    if any(e.directed for e in g.edges):
        raise ValueError("lexbfs_order expects an undirected graph")
    if not g.vertices:
        return []
    if not g.is_connected():
        raise ValueError("lexbfs_order expects a connected graph")
    if start is None:
        start = min(g.vertices) if rng is None else rng.choice(sorted(g.vertices))
    if start not in g.vertices:
        raise ValueError(f"start vertex {start} not in graph")
    rest = set(g.vertices)
    rest.discard(start)
    parts: list[set[int]] = [{start}] + ([rest] if rest else [])
    order = []
    while parts:
        head = parts[0]
        if rng is None:
            v = min(head)
        else:
            v = rng.choice(sorted(head))
        head.discard(v)
        if not head:
            parts.pop(0)
        order.append(v)
        nb = g.neighbors(v)
        refined = []
        for p in parts:
            inside = p & nb
            if inside and len(inside) < len(p):
                refined.append(inside)
                refined.append(p - inside)
            else:
                refined.append(p)
        parts = refined
    return order


def orient_by_ordering(g: MixedGraph, order: Sequence[int]) -> MixedGraph:
    if sorted(order) != sorted(g.vertices):
        raise ValueError("order must be a permutation of the vertex set")
    pos = {v: i for i, v in enumerate(order)}
    out = []
    for e in g.edges:
        u, v = e.tail, e.head
        out.append(arc(u, v) if pos[u] < pos[v] else arc(v, u))
    return MixedGraph(g.n, out, g.vertices)


def _bron_kerbosch(r: set, p: set, x: set, nbrs, out: list) -> None:
    if not p and not x:
        out.append(frozenset(r))
        return
    pivot = max(p | x, key=lambda u: len(p & nbrs[u]))
    for u in sorted(p - nbrs[pivot]):
        _bron_kerbosch(r | {u}, p & nbrs[u], x & nbrs[u], nbrs, out)
        p = p - {u}
        x = x | {u}


def maximal_cliques_in_neighborhood(g: MixedGraph, v: int) -> list[frozenset[int]]:
    """Maximal cliques of the skeleton restricted to ``neigh(v)`` (``v`` excluded)."""
    nb = set(g.neighbors(v))
    if not nb:
        return []
    local = {u: g.neighbors(u) & nb for u in nb}
    out: list[frozenset[int]] = []
    _bron_kerbosch(set(), set(nb), set(), local, out)
    return sorted(out, key=lambda c: sorted(c))


def find_directed_cycle(e) -> Optional[list[int]]:
    """A directed cycle ``[v0, v1, ..., v0]`` in the directed-mark subgraph, or ``None``."""
    es = _edges_of(e)
    succ: dict[int, list[int]] = {}
    for x in es:
        if x.directed:
            succ.setdefault(x.tail, []).append(x.head)
    for k in succ:
        succ[k].sort()
    color: dict[int, int] = {}
    for root in sorted(succ):
        if color.get(root):
            continue
        color[root] = 1
        path = [root]
        stack = [iter(succ.get(root, ()))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                color[path.pop()] = 2
                continue
            c = color.get(nxt, 0)
            if c == 1:
                i = path.index(nxt)
                return path[i:] + [nxt]
            if c == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append(iter(succ.get(nxt, ())))
    return None


def has_directed_cycle(e) -> bool:
    return find_directed_cycle(e) is not None


def _stays_chordal(nbrs: dict[int, set[int]], u: int, v: int) -> bool:
    # G + uv is chordal iff u, v are disconnected once their common neighbours are removed
    blocked = nbrs[u] & nbrs[v]
    seen = {u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in nbrs[x]:
            if y == v:
                return False
            if y not in seen and y not in blocked:
                seen.add(y)
                queue.append(y)
    return True


def random_chordal(n: int, m: int, seed: int = 0) -> MixedGraph:
    """Random connected chordal graph with exactly ``m`` undirected edges.

    A random labelled recursive tree is grown first; extra edges are then
    proposed between vertices at distance two and kept only when the graph
    stays chordal.
    """
    if n < 1:
        raise ValueError("n must be positive")
    lo, hi = n - 1, n * (n - 1) // 2
    if not lo <= m <= hi:
        raise ValueError(f"infeasible edge count m={m} for n={n} (need {lo} <= m <= {hi})")
    rng = random.Random(seed)
    labels = list(range(n))
    rng.shuffle(labels)
    nbrs: dict[int, set[int]] = {v: set() for v in range(n)}
    for i in range(1, n):
        u, w = labels[i], labels[rng.randrange(i)]
        nbrs[u].add(w)
        nbrs[w].add(u)
    count = n - 1
    failures = 0
    while count < m:
        u = rng.randrange(n)
        if not nbrs[u] or len(nbrs[u]) == n - 1:
            failures += 1
        else:
            w = rng.choice(sorted(nbrs[u]))
            cand = sorted(nbrs[w] - nbrs[u] - {u})
            if cand:
                v = rng.choice(cand)
                if _stays_chordal(nbrs, u, v):
                    nbrs[u].add(v)
                    nbrs[v].add(u)
                    count += 1
                    failures = 0
                    continue
            failures += 1
        if failures > 50 * n:
            # exhaustive sweep so dense targets never stall
            pairs = sorted(
                (a, b)
                for a in range(n)
                for x in nbrs[a]
                for b in nbrs[x]
                if a < b and b not in nbrs[a]
            )
            rng.shuffle(pairs)
            for a, b in pairs:
                if b not in nbrs[a] and _stays_chordal(nbrs, a, b):
                    nbrs[a].add(b)
                    nbrs[b].add(a)
                    count += 1
                    break
            else:  # pragma: no cover - a non-complete chordal graph always admits a chordal addition
                raise RuntimeError("chordal edge addition stalled")
            failures = 0
    return MixedGraph.undirected(n, ((a, b) for a in range(n) for b in nbrs[a] if a < b))


def random_dag(n: int, m: int, seed: int = 0) -> MixedGraph:
    """Random DAG with ``m`` edges sampled uniformly over pairs, oriented along a random order."""
    hi = n * (n - 1) // 2
    if n < 1 or not 0 <= m <= hi:
        raise ValueError(f"infeasible edge count m={m} for n={n}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    chosen: set[tuple[int, int]] = set()
    if m > hi // 2:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        chosen = set(rng.sample(pairs, m))
    else:
        while len(chosen) < m:
            a, b = rng.randrange(n), rng.randrange(n)
            if a != b:
                chosen.add((min(a, b), max(a, b)))
    edges = [arc(a, b) if rank[a] < rank[b] else arc(b, a) for a, b in sorted(chosen)]
    return MixedGraph(n, edges)


def mpdag_of(dag: MixedGraph) -> MixedGraph:
    """Keep only the v-structure edges of ``dag`` directed."""
    vs = v_structures(dag.edges)
    keep = {(i, k) for i, k, j in vs} | {(j, k) for i, k, j in vs}
    return MixedGraph(
        dag.n,
        (e if (e.tail, e.head) in keep else line(e.tail, e.head) for e in dag.edges),
        dag.vertices,
    )


def random_mpdag(n: int, m: int, seed: int = 0) -> MixedGraph:
    """MPDAG with ``m`` edges from a LexBFS-oriented random chordal graph.

    A chordal graph with ``m + 1`` edges is oriented along a random LexBFS
    order, then one edge whose removal creates a v-structure is dropped.
    """
    rng = random.Random(seed)
    g = random_chordal(n, m + 1, rng.randrange(2**32))
    dag = orient_by_ordering(g, lexbfs_order(g, rng=rng))
    chi = {v: dag.children(v) for v in dag.vertices}
    cands = [e for e in sorted(dag.edges) if chi[e.tail] & chi[e.head]]
    if not cands:
        raise ValueError(f"no edge removal creates a v-structure (n={n}, m={m})")
    drop = cands[rng.randrange(len(cands))]
    return mpdag_of(MixedGraph(n, (e for e in dag.edges if e != drop)))


def shd(a: MixedGraph, b: MixedGraph) -> int:
    """Number of vertex pairs whose edge status (absent / undirected / oriented) differs."""
    if a.vertices != b.vertices:
        raise ValueError("shd needs graphs over the same vertex set")
    status_a = {e.pair: e for e in a.edges}
    status_b = {e.pair: e for e in b.edges}
    return sum(1 for p in status_a.keys() | status_b.keys() if status_a.get(p) != status_b.get(p))


def classify(g: MixedGraph) -> str:
    """Coarse structural class. PCCG/ICCG extendability is not checked here."""
    if g.is_fully_directed() and not has_directed_cycle(g.edges):
        return GraphClass.DAG
    skel = g.skeleton()
    uccg_skel = skel.is_connected() and is_chordal(skel)
    if g.is_undirected() and uccg_skel:
        return GraphClass.UCCG
    if uccg_skel and not v_structures(g.edges) and not has_directed_cycle(g.edges):
        d = g.directed_edges
        for v in sorted(g.vertices):
            star = {e for e in d if v in (e.tail, e.head)}
            if star == set(d) and len(star) == len(g.neighbors(v)):
                return GraphClass.ICCG
        return GraphClass.PCCG
    if not has_directed_cycle(g.edges):
        vs = v_structures(g.edges)
        in_v = {arc(i, k) for i, k, j in vs} | {arc(j, k) for i, k, j in vs}
        if in_v and in_v <= g.directed_edges:
            return GraphClass.MPDAG
    return GraphClass.GENERAL


def iter_pairs(vs: Sequence[int]) -> Iterator[tuple[int, int]]:
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            yield vs[a], vs[b]
