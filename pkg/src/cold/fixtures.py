"""Small reference graphs with byte-exact expected outputs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import meek
from .dp import build_dp_table, i_essential_after_intervention
from .io import LabeledGraph, format_edges, parse_text

__all__ = ["GRAPHS", "Fixture", "FIXTURES", "TABLE_ROWS", "TABLE_CORRECTIONS", "expected_table_dump", "run_fixtures", "write_graphs"]

CHAIN = """\
# one directed edge followed by an undirected chain
v1 -> v2
v2 -- v3
v3 -- v4
"""

FIVE = """\
# five-vertex chordal graph: triangles v1 v2 v4 and v2 v3 v4 plus pendant v5
v5 -- v1
v1 -- v2
v1 -- v4
v4 -- v2
v2 -- v3
v4 -- v3
"""

K4 = """\
v1 -- v2
v1 -- v3
v1 -- v4
v2 -- v3
v2 -- v4
v3 -- v4
"""

GRAPHS = {"chain.txt": CHAIN, "five.txt": FIVE, "k4.txt": K4}

# single-edge closure rows for FIVE, as reference label pairs
TABLE_ROWS: dict[tuple[str, str], set[tuple[str, str]]] = {
    ("v2", "v1"): {("v2", "v1"), ("v1", "v5"), ("v4", "v1")},
    ("v1", "v2"): {("v1", "v2"), ("v2", "v3"), ("v4", "v3")},
    ("v4", "v1"): {("v4", "v1"), ("v1", "v5")},
    ("v1", "v4"): {("v1", "v4"), ("v2", "v3"), ("v4", "v3")},
    ("v3", "v2"): {("v3", "v2"), ("v4", "v1"), ("v2", "v1"), ("v1", "v5")},
    ("v2", "v3"): {("v2", "v3")},
    ("v4", "v2"): {("v4", "v2")},
    ("v2", "v4"): {("v2", "v4")},
    ("v4", "v3"): {("v4", "v3")},
    ("v3", "v4"): {("v3", "v4"), ("v4", "v1"), ("v1", "v5"), ("v2", "v1")},
    ("v5", "v1"): {("v5", "v1"), ("v1", "v2"), ("v2", "v3"), ("v1", "v4"), ("v4", "v3")},
    ("v1", "v5"): {("v1", "v5")},
}

# the reference row for v2->v1 lists v4->v1, which neither rule 1 nor rule 4
# derives from v2->v1 alone (v4 is adjacent to v2); the closure value is used
TABLE_CORRECTIONS: dict[tuple[str, str], set[tuple[str, str]]] = {
    ("v2", "v1"): {("v2", "v1"), ("v1", "v5")},
}


def _sort_key(lg: LabeledGraph):
    return lambda pair: (lg.lookup(pair[0]), lg.lookup(pair[1]))


def expected_table_dump(corrected: bool = True) -> str:
    lg = parse_text(FIVE)
    rows = dict(TABLE_ROWS)
    if corrected:
        rows.update(TABLE_CORRECTIONS)
    key = _sort_key(lg)
    out = []
    for idx in sorted(rows, key=key):
        body = ", ".join(f"{a}->{b}" for a, b in sorted(rows[idx], key=key))
        out.append(f"{idx[0]}->{idx[1]} : {{{body}}}\n")
    return "".join(out)


@dataclass(frozen=True)
class Fixture:
    name: str
    run: Callable[[], str]
    expected: str


def _close_chain(forbidden: bool) -> str:
    lg = parse_text(CHAIN)
    fb = [(lg.lookup("v2"), lg.lookup("v3"))] if forbidden else None
    return format_edges(meek.meek_closure(lg.graph.edges, meek.M1, fb), lg.label)


def _intervene_five() -> str:
    lg = parse_text(FIVE)
    out = i_essential_after_intervention(lg.graph, lg.lookup("v3"), [lg.lookup("v4")])
    return format_edges(out.oriented, lg.label)


def _table_five() -> str:
    lg = parse_text(FIVE)
    return build_dp_table(lg.graph).dump(lg.label)


FIXTURES = [
    Fixture("closure-r1", lambda: _close_chain(False), "v1 -> v2\nv2 -> v3\nv3 -> v4\n"),
    Fixture("closure-r1-forbidden", lambda: _close_chain(True), "v1 -> v2\nv2 -- v3\nv3 -- v4\n"),
    Fixture(
        "intervention-v3-parent-v4",
        _intervene_five,
        "v1 -> v5\nv2 -> v1\nv3 -> v2\nv4 -> v1\nv4 -> v2\nv4 -> v3\n",
    ),
    Fixture("table-five", _table_five, expected_table_dump()),
]


def run_fixtures() -> list[tuple[str, bool, str]]:
    results = []
    for f in FIXTURES:
        got = f.run()
        results.append((f.name, got == f.expected, got))
    return results


def write_graphs(directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in GRAPHS.items():
        p = d / name
        p.write_text(text)
        paths.append(p)
    return paths
