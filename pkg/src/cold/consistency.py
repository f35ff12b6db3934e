"""Checking expert orientations on a chordal skeleton.

A set of directed edges over a UCCG extends to a v-structure-free DAG iff
it has no directed cycle and no two of its edges force opposite
orientations of some pair through their table entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

from . import meek
from .dp import DpTable
from .graph import Edge, MixedGraph, find_directed_cycle, has_directed_cycle, is_chordal, v_structures

__all__ = [
    "CycleWitness",
    "EdgePairWitness",
    "ClosureConflictWitness",
    "ConsistencyVerdict",
    "edges_consistent",
    "clashing_edge",
    "check_consistency",
    "pdag_to_dag",
]


@dataclass(frozen=True)
class CycleWitness:
    cycle: tuple[int, ...]


@dataclass(frozen=True)
class EdgePairWitness:
    e1: Edge
    e2: Edge
    clash: Edge  # in DP[e1]; its reversal is in DP[e2]


@dataclass(frozen=True)
class ClosureConflictWitness:
    edge: Edge
    detail: str


Violation = Union[CycleWitness, EdgePairWitness, ClosureConflictWitness]


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    witness: Optional[MixedGraph] = None
    violation: Optional[Violation] = None


def _directed(e) -> tuple[int, int]:
    if isinstance(e, Edge):
        if not e.directed:
            raise ValueError(f"{e} is not a directed edge")
        return e.tail, e.head
    return int(e[0]), int(e[1])


def clashing_edge(e1, e2, table: DpTable) -> Optional[Edge]:
    """Lowest ``k -> l`` in ``DP[e1]`` whose reversal lies in ``DP[e2]``, or None."""
    a, b = table[_directed(e1)], table[_directed(e2)]
    hits = [x for x in a if x.reversed() in b]
    return min(hits) if hits else None


def edges_consistent(e1, e2, table: DpTable) -> bool:
    return clashing_edge(e1, e2, table) is None


def _require_uccg_skeleton(g: MixedGraph) -> MixedGraph:
    skel = g.skeleton()
    if not skel.is_connected():
        raise ValueError("skeleton is not connected")
    if not is_chordal(skel):
        raise ValueError("skeleton is not chordal")
    return skel


def check_consistency(g: MixedGraph, table: Optional[DpTable] = None) -> ConsistencyVerdict:
    skel = _require_uccg_skeleton(g)
    if table is None:
        table = DpTable(skel)
    else:
        table.check_graph(skel)
    directed = sorted(g.directed_edges)
    cyc = find_directed_cycle(directed)
    if cyc is not None:
        return ConsistencyVerdict(False, None, CycleWitness(tuple(cyc)))
    for e1, e2 in combinations(directed, 2):
        clash = clashing_edge(e1, e2, table)
        if clash is not None:
            return ConsistencyVerdict(False, None, EdgePairWitness(e1, e2, clash))
    try:
        dag = pdag_to_dag(g)
    except meek.ConflictError as exc:  # pragma: no cover - excluded by the pairwise check
        return ConsistencyVerdict(False, None, ClosureConflictWitness(exc.edge, str(exc)))
    return ConsistencyVerdict(True, dag, None)


def pdag_to_dag(g: MixedGraph) -> MixedGraph:
    """A v-structure-free DAG extension: close, orient the lowest-id open star outward, repeat."""
    _require_uccg_skeleton(g)
    cur = meek.meek_closure(g.edges, meek.M124)
    while True:
        und: dict[int, list[int]] = {}
        for e in cur:
            if not e.directed:
                und.setdefault(e.tail, []).append(e.head)
                und.setdefault(e.head, []).append(e.tail)
        if not und:
            break
        v = min(und)
        out = set(und[v])
        cur = frozenset(
            Edge(v, e.head if e.tail == v else e.tail, True) if not e.directed and (e.tail == v or e.head == v) else e
            for e in cur
        )
        assert all(Edge(v, o, True) in cur for o in out)
        cur = meek.meek_closure(cur, meek.M124)
    dag = MixedGraph(g.n, cur, g.vertices)
    if has_directed_cycle(dag.edges) or v_structures(dag.edges):
        raise meek.ConflictError(min(dag.edges), ("extension is not a v-structure-free DAG",))
    return dag
