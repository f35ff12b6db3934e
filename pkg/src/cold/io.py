"""Reading and writing mixed edge lists.

Text format, one item per line::

    # comment
    v1 -- v2        undirected edge
    v2 -> v3        directed edge
    v7              isolated vertex

Labels are decimal ids with an optional ``v`` prefix. They are remapped to
dense ids ``0..n-1`` in increasing numeric order; the original labels are
kept for display and for command-line lookup.

JSON format: ``{"n": int, "labels": [str]?, "edges": [[u, v, directed]], "metadata": {...}}``
with ``u``, ``v`` dense ids.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .graph import Edge, MixedGraph

__all__ = ["LabeledGraph", "GraphFormatError", "parse_text", "parse_json", "load", "dumps_text", "dumps_json", "format_edges"]

_LABEL = re.compile(r"^v?(\d+)$")
_LINE = re.compile(r"^(\S+)\s*(--|->|<-)\s*(\S+)$")


class GraphFormatError(ValueError):
    pass


@dataclass
class LabeledGraph:
    graph: MixedGraph
    labels: list[str]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {lab: i for i, lab in enumerate(self.labels)}

    def label(self, v: int) -> str:
        return self.labels[v]

    def lookup(self, label: str) -> int:
        if label in self.index:
            return self.index[label]
        # accept "3" for "v3" and vice versa
        m = _LABEL.match(label)
        if m:
            for cand in (m.group(1), "v" + m.group(1)):
                if cand in self.index:
                    return self.index[cand]
        raise KeyError(label)


def _key(label: str, where: str) -> int:
    m = _LABEL.match(label)
    if not m:
        raise GraphFormatError(f"{where}: bad vertex label {label!r}")
    return int(m.group(1))


def parse_text(text: str, source: str = "<input>") -> LabeledGraph:
    items: list[tuple[str, str, str, int]] = []
    seen: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        where = f"{source}:{lineno}"
        m = _LINE.match(s)
        if m:
            a, op, b = m.groups()
            ends = [a, b]
        elif len(s.split()) == 1:
            a, op, b = s, "", ""
            ends = [a]
        else:
            raise GraphFormatError(f"{where}: cannot parse {raw.strip()!r}")
        for lab in ends:
            k = _key(lab, where)
            if k in seen and seen[k] != lab:
                raise GraphFormatError(f"{where}: labels {seen[k]!r} and {lab!r} name the same id")
            seen[k] = lab
        if op:
            if a == b:
                raise GraphFormatError(f"{where}: self-loop on {a}")
            items.append((a, op, b, lineno))
    labels = [seen[k] for k in sorted(seen)]
    index = {lab: i for i, lab in enumerate(labels)}
    edges = []
    pairs: dict[tuple[int, int], int] = {}
    for a, op, b, lineno in items:
        u, v = index[a], index[b]
        if op == "<-":
            u, v = v, u
        p = (min(u, v), max(u, v))
        if p in pairs:
            raise GraphFormatError(f"{source}:{lineno}: second edge between {a} and {b} (first on line {pairs[p]})")
        pairs[p] = lineno
        edges.append(Edge(u, v, True) if op != "--" else Edge(p[0], p[1], False))
    return LabeledGraph(MixedGraph(len(labels), edges), labels)


def parse_json(text: str, source: str = "<input>") -> LabeledGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{source}: {exc}") from exc
    try:
        n = int(doc["n"])
        edges = [Edge(int(u), int(v), bool(d)) if d else Edge(min(int(u), int(v)), max(int(u), int(v)), False) for u, v, d in doc["edges"]]
        labels = [str(x) for x in doc.get("labels", range(n))]
        g = MixedGraph(n, edges)
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"{source}: {exc}") from exc
    if len(labels) != n:
        raise GraphFormatError(f"{source}: {len(labels)} labels for {n} vertices")
    return LabeledGraph(g, labels, dict(doc.get("metadata", {})))


def load(path: Union[str, Path]) -> LabeledGraph:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise GraphFormatError(f"{p}: {exc.strerror}") from exc
    if p.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_json(text, str(p))
    return parse_text(text, str(p))


def format_edges(edges: Iterable[Edge], label=str) -> str:
    """One edge per line, sorted by dense id, newline-terminated."""
    out = []
    for e in sorted(edges):
        op = "->" if e.directed else "--"
        out.append(f"{label(e.tail)} {op} {label(e.head)}\n")
    return "".join(out)


def dumps_text(g: MixedGraph, labels: Optional[list[str]] = None, header: str = "") -> str:
    lab = (lambda v: labels[v]) if labels else str
    lines = "".join(f"# {h}\n" for h in header.splitlines()) if header else ""
    used = {x for e in g.edges for x in (e.tail, e.head)}
    isolated = "".join(f"{lab(v)}\n" for v in sorted(g.vertices) if v not in used)
    return lines + format_edges(g.edges, lab) + isolated


def dumps_json(g: MixedGraph, metadata: Optional[dict] = None, labels: Optional[list[str]] = None) -> str:
    doc = {
        "n": g.n,
        "edges": [[e.tail, e.head, e.directed] for e in sorted(g.edges)],
        "metadata": metadata or {},
    }
    if labels:
        doc["labels"] = labels
    return json.dumps(doc, sort_keys=True) + "\n"
