"""Conventional Meek-rule closure.

Two schedulers compute the same fixpoint:

* the default worklist re-examines only undirected edges near a freshly
  oriented edge;
* ``naive=True`` rescans the whole graph for every rule until nothing
  changes, the way the classic PC-style implementations do.

Rule 3 and rule 4 use the candidate sub-graphs in which some edges
("dashed") may be undirected or directed either way, provided the directed
version does not take part in a v-structure.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional

from .graph import Edge, arc, line, _edges_of

__all__ = [
    "Rule",
    "Candidate",
    "ConflictError",
    "parse_rules",
    "find_candidates",
    "meek_closure",
    "M1",
    "M12",
    "M123",
    "M124",
    "M14",
    "M1234",
]


class Rule(IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4


M1 = frozenset({Rule.R1})
M14 = frozenset({Rule.R1, Rule.R4})
M12 = frozenset({Rule.R1, Rule.R2})
M123 = frozenset({Rule.R1, Rule.R2, Rule.R3})
M124 = frozenset({Rule.R1, Rule.R2, Rule.R4})
M1234 = frozenset(Rule)


def parse_rules(rules) -> frozenset[Rule]:
    """``"124"``, ``[1, 2, 4]`` or an iterable of :class:`Rule` -> rule set."""
    if isinstance(rules, str):
        items = [c for c in rules.replace(",", "") if not c.isspace()]
    else:
        items = list(rules)
    try:
        out = frozenset(Rule(int(x)) for x in items)
    except ValueError as exc:
        raise ValueError(f"unknown Meek rule in {rules!r}") from exc
    if not out:
        raise ValueError("rule set must be nonempty")
    return out


@dataclass(frozen=True)
class Candidate:
    rule: Rule
    vertices: tuple[int, ...]
    orients: tuple[Edge, ...]


class ConflictError(ValueError):
    """Both orientations of one vertex pair were derived (inconsistent input)."""

    def __init__(self, edge: Edge, witnesses: tuple = ()):
        self.edge = edge
        self.witnesses = witnesses
        msg = f"conflicting orientations for pair {edge.pair}"
        if witnesses:
            msg += ": " + "; ".join(_describe(w) for w in witnesses)
        super().__init__(msg)


def _describe(w) -> str:
    if isinstance(w, Candidate):
        return f"R{int(w.rule)} on {w.vertices} orients {', '.join(str(e) for e in w.orients)}"
    return str(w)


class _State:
    """Mutable adjacency copy used while closing."""

    __slots__ = ("adj", "par", "chi", "und")

    def __init__(self, edges: Iterable[Edge]):
        self.adj: dict[int, set[int]] = {}
        self.par: dict[int, set[int]] = {}
        self.chi: dict[int, set[int]] = {}
        self.und: dict[int, set[int]] = {}
        for e in edges:
            for x in (e.tail, e.head):
                if x not in self.adj:
                    self.adj[x] = set()
                    self.par[x] = set()
                    self.chi[x] = set()
                    self.und[x] = set()
        for e in edges:
            u, v = e.tail, e.head
            if v in self.adj[u]:
                if e.directed and (u in self.chi[v]):
                    raise ConflictError(e, (f"input holds both {u} -> {v} and {v} -> {u}",))
                raise ValueError(f"more than one edge between {u} and {v}")
            self.adj[u].add(v)
            self.adj[v].add(u)
            if e.directed:
                self.chi[u].add(v)
                self.par[v].add(u)
            else:
                self.und[u].add(v)
                self.und[v].add(u)

    def orient(self, u: int, v: int) -> None:
        self.und[u].discard(v)
        self.und[v].discard(u)
        self.chi[u].add(v)
        self.par[v].add(u)

    def edges(self) -> frozenset[Edge]:
        out = set()
        for u, cs in self.chi.items():
            for v in cs:
                out.add(Edge(u, v, True))
        for u, us in self.und.items():
            for v in us:
                if u < v:
                    out.add(Edge(u, v, False))
        return frozenset(out)

    # dashed edge x-y matches unless it is directed and sits in a v-structure
    def dashed_ok(self, x: int, y: int) -> bool:
        if y in self.und[x]:
            return True
        if y in self.chi[x]:
            t, h = x, y
        else:
            t, h = y, x
        return not any(z != t and z not in self.adj[t] for z in self.par[h])

    # -- per-rule witnesses for orienting a -> b (a -- b undirected)
    def r1(self, a: int, b: int) -> Optional[Candidate]:
        for c in sorted(self.par[a]):
            if b not in self.adj[c]:
                return Candidate(Rule.R1, (c, a, b), (arc(a, b),))
        return None

    def r2(self, a: int, b: int) -> Optional[Candidate]:
        mid = self.chi[a] & self.par[b]
        if mid:
            c = min(mid)
            return Candidate(Rule.R2, (a, c, b), (arc(a, b),))
        return None

    def r3(self, a: int, b: int) -> Optional[Candidate]:
        # i=a, k=b: j -> k <- l, j, l non-adjacent, a adjacent to both
        ps = sorted(self.par[b] & self.adj[a])
        for x in range(len(ps)):
            j = ps[x]
            for y in range(x + 1, len(ps)):
                l = ps[y]
                if l in self.adj[j]:
                    continue
                if self.dashed_ok(a, j) and self.dashed_ok(a, l):
                    return Candidate(Rule.R3, (a, b, j, l), (arc(a, b),))
        return None

    def r4(self, a: int, b: int) -> Optional[Candidate]:
        # i=a, j=b: s -> d, d - b, s not adjacent to b, a adjacent to s, d, b
        for d in sorted(self.adj[a] & self.adj[b]):
            if not (b in self.und[d] or b in self.chi[d]):
                continue
            for s in sorted(self.par[d] & self.adj[a]):
                if s == b or b in self.adj[s]:
                    continue
                if self.dashed_ok(a, s) and self.dashed_ok(a, d):
                    orients = (arc(a, b),) + ((arc(d, b),) if b in self.und[d] else ())
                    return Candidate(Rule.R4, (s, d, b, a), orients)
        return None

    def witness(self, a: int, b: int, rules, forbidden) -> Optional[Candidate]:
        if Rule.R1 in rules and (forbidden is None or (min(a, b), max(a, b)) not in forbidden):
            w = self.r1(a, b)
            if w:
                return w
        if Rule.R2 in rules:
            w = self.r2(a, b)
            if w:
                return w
        if Rule.R3 in rules:
            w = self.r3(a, b)
            if w:
                return w
        if Rule.R4 in rules:
            w = self.r4(a, b)
            if w:
                return w
        return None


def find_candidates(e, rule) -> list[Candidate]:
    """Every candidate sub-graph of ``rule`` present in ``e``."""
    rule = Rule(int(rule))
    st = _State(_edges_of(e))
    out: list[Candidate] = []
    if rule is Rule.R1:
        for k in sorted(st.adj):
            for i in sorted(st.par[k]):
                for j in sorted(st.und[k]):
                    if j not in st.adj[i]:
                        out.append(Candidate(rule, (i, k, j), (arc(k, j),)))
    elif rule is Rule.R2:
        for k in sorted(st.adj):
            for i in sorted(st.par[k]):
                for j in sorted(st.chi[k]):
                    if j in st.und[i]:
                        out.append(Candidate(rule, (i, k, j), (arc(i, j),)))
    elif rule is Rule.R3:
        for k in sorted(st.adj):
            for i in sorted(st.und[k]):
                ps = sorted(st.par[k] & st.adj[i])
                for x in range(len(ps)):
                    for y in range(x + 1, len(ps)):
                        j, l = ps[x], ps[y]
                        if l not in st.adj[j] and st.dashed_ok(i, j) and st.dashed_ok(i, l):
                            out.append(Candidate(rule, (i, k, j, l), (arc(i, k),)))
    else:
        for s in sorted(st.adj):
            for d in sorted(st.chi[s]):
                for j in sorted(st.adj[d]):
                    if j == s or j in st.adj[s]:
                        continue
                    if not (j in st.und[d] or j in st.chi[d]):
                        continue
                    for i in sorted(st.adj[s] & st.adj[d] & st.adj[j]):
                        if j in st.und[i] and st.dashed_ok(i, s) and st.dashed_ok(i, d):
                            orients = (arc(i, j),) + ((arc(d, j),) if j in st.und[d] else ())
                            out.append(Candidate(rule, (s, d, j, i), orients))
    return out


def _forbidden_pairs(forbidden) -> Optional[frozenset[tuple[int, int]]]:
    if forbidden is None:
        return None
    out = set()
    for f in forbidden:
        if isinstance(f, Edge):
            out.add(f.pair)
        else:
            u, v = f[0], f[1]
            out.add((min(u, v), max(u, v)))
    return frozenset(out)


def meek_closure(
    e,
    rules=M1234,
    forbidden=None,
    *,
    naive: bool = False,
    rng: Optional[random.Random] = None,
) -> frozenset[Edge]:
    """Least fixpoint of the Meek rules in ``rules`` starting from edge set ``e``.

    ``forbidden`` lists undirected pairs that rule 1 must leave alone.
    ``rng`` shuffles the worklist schedule (used to test order independence).
    Raises :class:`ConflictError` when one pair is forced both ways.
    """
    rules = parse_rules(rules) if not isinstance(rules, frozenset) else rules
    es = _edges_of(e)
    fb = _forbidden_pairs(forbidden)
    st = _State(es)
    if naive:
        _close_naive(st, rules, fb)
    else:
        _close_worklist(st, rules, fb, rng)
    return st.edges()


def _apply(st: _State, a: int, b: int, rules, fb) -> bool:
    fwd = st.witness(a, b, rules, fb)
    if fwd is None:
        w = st.witness(b, a, rules, fb)
        if w is None:
            return False
        a, b, fwd = b, a, w
    else:
        back = st.witness(b, a, rules, fb)
        if back is not None:
            raise ConflictError(line(a, b), (fwd, back))
    for x in fwd.orients:
        if x.head in st.und[x.tail]:
            st.orient(x.tail, x.head)
    return True


def _close_worklist(st: _State, rules, fb, rng) -> None:
    # every rule needs a directed edge whose head, tail, or head's neighbour
    # touches the edge being oriented; nothing else can fire initially
    hot: set[int] = set()
    for u, cs in st.chi.items():
        if cs:
            hot.add(u)
            for v in cs:
                hot.add(v)
                hot |= st.adj[v]
    pending = sorted((u, v) for u in hot for v in st.und[u] if u < v or v not in hot)
    pending = sorted({(min(p), max(p)) for p in pending})
    if rng is not None:
        rng.shuffle(pending)
    queue = deque(pending)
    queued = set(pending)
    while queue:
        if rng is not None and len(queue) > 1:
            k = rng.randrange(len(queue))
            queue.rotate(-k)
        a, b = queue.popleft()
        queued.discard((a, b))
        if b not in st.und[a]:
            continue
        if not _apply(st, a, b, rules, fb):
            continue
        touched = {a, b}
        for x in (a, b):
            touched |= st.adj[x]
        fresh = []
        for x in touched:
            for y in st.und[x]:
                p = (x, y) if x < y else (y, x)
                if p not in queued:
                    queued.add(p)
                    fresh.append(p)
        fresh.sort()
        if rng is not None:
            rng.shuffle(fresh)
        queue.extend(fresh)


def _close_naive(st: _State, rules, fb) -> None:
    order = sorted(rules)
    changed = True
    while changed:
        changed = False
        for r in order:
            for u in sorted(st.und):
                for v in sorted(st.und[u]):
                    if u > v or v not in st.und[u]:
                        continue
                    if _apply(st, u, v, frozenset({r}), fb):
                        changed = True
