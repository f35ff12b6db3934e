"""Command-line front end.

Exit status: 0 on success, 1 on usage or input errors, 2 when ``check``
finds an inconsistent orientation or ``fixtures`` has a failing case.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from . import bench, meek
from .consistency import CycleWitness, EdgePairWitness, check_consistency
from .design import POLICIES, active_learning_run, random_truth_dag, select_lb_node, select_minmax_node
from .dp import DpTable, build_dp_table, essential_from_mpdag, i_essential_after_intervention
from .fixtures import run_fixtures, write_graphs
from .graph import is_chordal, random_chordal, random_dag, random_mpdag
from .io import GraphFormatError, LabeledGraph, dumps_json, dumps_text, format_edges, load
from .mec import MecStats, brute_force_mec_size, count_mec


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _load(path: str) -> LabeledGraph:
    return load(path)


def _vertex(lg: LabeledGraph, label: str, flag: str) -> int:
    try:
        return lg.lookup(label)
    except KeyError:
        raise UsageError(f"{flag}: unknown vertex {label!r}") from None


def _labels(lg: LabeledGraph, text: str, flag: str) -> list[int]:
    return [_vertex(lg, x, flag) for x in text.replace(",", " ").split()]


def _pairs(lg: LabeledGraph, text: str, flag: str) -> list[tuple[int, int]]:
    out = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        for sep in ("--", "-"):
            if sep in item:
                a, b = item.split(sep, 1)
                break
        else:
            raise UsageError(f"{flag}: expected pairs like v2--v3, got {item!r}")
        out.append((_vertex(lg, a, flag), _vertex(lg, b, flag)))
    return out


def _require_uccg(lg: LabeledGraph, what: str) -> None:
    g = lg.graph
    if not g.is_undirected():
        raise GraphFormatError(f"{what} needs an undirected graph")
    if not g.is_connected():
        raise GraphFormatError(f"{what} needs a connected graph")
    if not is_chordal(g):
        raise GraphFormatError(f"{what} needs a chordal graph")


def cmd_gen(a) -> int:
    if a.kind == "chordal":
        g = random_chordal(a.n, a.m, a.seed)
    elif a.kind == "mpdag":
        g = random_mpdag(a.n, a.m, a.seed)
    else:
        g = random_dag(a.n, a.m, a.seed)
    meta = {"generator": a.kind, "seed": a.seed, "n": a.n, "m": a.m}
    if a.format == "json":
        text = dumps_json(g, meta)
    else:
        text = dumps_text(g, header=f"generator={a.kind} n={a.n} m={a.m} seed={a.seed}")
    if a.output:
        Path(a.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_close(a) -> int:
    lg = _load(a.graph)
    try:
        rules = meek.parse_rules(a.rules)
    except ValueError as exc:
        raise UsageError(f"--rules: {exc}") from None
    fb = _pairs(lg, a.forbidden, "--forbidden") if a.forbidden else None
    out = meek.meek_closure(lg.graph.edges, rules, fb, naive=a.naive)
    sys.stdout.write(format_edges(out, lg.label))
    return 0


def cmd_essential(a) -> int:
    lg = _load(a.graph)
    if a.conventional:
        out = meek.meek_closure(lg.graph.edges, meek.M123, naive=True)
    else:
        out = essential_from_mpdag(lg.graph).edges
    sys.stdout.write(format_edges(out, lg.label))
    return 0


def cmd_intervene(a) -> int:
    lg = _load(a.graph)
    _require_uccg(lg, "intervene")
    v = _vertex(lg, a.node, "--node")
    ins = _labels(lg, a.ingoing, "--ingoing") if a.ingoing else []
    try:
        out = i_essential_after_intervention(lg.graph, v, ins, conventional=a.conventional)
    except ValueError as exc:
        raise UsageError(f"--ingoing: {exc}") from None
    sys.stdout.write(format_edges(out.oriented, lg.label))
    return 0


def cmd_table(a) -> int:
    lg = _load(a.graph)
    _require_uccg(lg, "table")
    sys.stdout.write(build_dp_table(lg.graph).dump(lg.label))
    return 0


def cmd_mecsize(a) -> int:
    lg = _load(a.graph)
    _require_uccg(lg, "mecsize")
    stats = MecStats()
    t0 = time.perf_counter()
    if a.brute_force:
        size = brute_force_mec_size(lg.graph, cap=a.cap)
    else:
        size = count_mec(
            lg.graph, closed_forms=not a.no_closed_forms, conventional_root=a.conventional_root, stats=stats
        )
    elapsed = time.perf_counter() - t0
    print(f"size: {size}")
    print(f"method: {'brute-force' if a.brute_force else 'conventional-root' if a.conventional_root else 'table'}")
    print(f"wall_time_s: {elapsed:.6f}")
    if not a.brute_force:
        for k, val in asdict(stats).items():
            print(f"{k}: {val}")
    return 0


def cmd_design(a) -> int:
    lg = _load(a.graph)
    _require_uccg(lg, "design")
    table = DpTable(lg.graph)
    if a.objective == "lb":
        v, score = select_lb_node(lg.graph, table)
    else:
        v, score = select_minmax_node(lg.graph, table, early_stop=(a.objective == "minmaxpt"))
    print(f"{lg.label(v)} {score}")
    return 0


def cmd_active_sim(a) -> int:
    base = None
    if a.graph:
        lg = _load(a.graph)
        _require_uccg(lg, "active-sim")
        base = lg.graph
    print("seed,policy,steps,oriented_per_step")
    for k in range(a.runs):
        seed = a.seed + k
        rng = random.Random(seed)
        if base is None:
            full = a.n * (a.n - 1) // 2
            m = a.m if a.m is not None else rng.randint(a.n - 1, full)
            g = random_chordal(a.n, m, rng.randrange(2**32))
        else:
            g = base
        truth = random_truth_dag(g, rng)
        for policy in a.policy:
            run = active_learning_run(truth, policy, seed)
            print(f"{seed},{run.policy},{run.interventions},{';'.join(map(str, run.trace))}")
    return 0


def cmd_check(a) -> int:
    lg = _load(a.graph)
    try:
        verdict = check_consistency(lg.graph)
    except ValueError as exc:
        raise GraphFormatError(f"{a.graph}: {exc}") from None
    if verdict.consistent:
        print("consistent")
        print("witness:")
        sys.stdout.write(format_edges(verdict.witness.edges, lg.label))
        return 0
    print("inconsistent")
    w = verdict.violation
    if isinstance(w, CycleWitness):
        print("cycle: " + " -> ".join(lg.label(x) for x in w.cycle))
    elif isinstance(w, EdgePairWitness):
        c = w.clash
        print(
            f"pair: {lg.label(w.e1.tail)} -> {lg.label(w.e1.head)} and {lg.label(w.e2.tail)} -> {lg.label(w.e2.head)}"
        )
        print(f"clash: {lg.label(c.tail)} -> {lg.label(c.head)} against {lg.label(c.head)} -> {lg.label(c.tail)}")
    else:
        print(f"conflict: {w.detail}")
    return 2


def cmd_bench(a) -> int:
    try:
        text = Path(a.config).read_text()
    except OSError as exc:
        raise GraphFormatError(f"{a.config}: {exc.strerror}") from None
    try:
        cfg = bench.parse_config(text)
    except ValueError as exc:
        raise GraphFormatError(f"{a.config}: {exc}") from None
    if a.reps is not None:
        cfg.reps = a.reps
    records = bench.bench_sweep(cfg)
    out = bench.to_csv(records, deterministic=a.deterministic)
    if a.output:
        Path(a.output).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_fixtures(a) -> int:
    if a.write:
        for p in write_graphs(a.write):
            print(f"wrote {p}")
    failed = 0
    for name, ok, got in run_fixtures():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failed += 1
            sys.stdout.write(got)
    return 2 if failed else 0


def _policy(name: str) -> str:
    for p in POLICIES:
        if p.lower() == name.lower():
            return p
    raise argparse.ArgumentTypeError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cold", description="Meek-rule orientation with reusable single-edge closure tables.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("gen", help="write a random graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--kind", choices=("chordal", "mpdag", "dag"), default="chordal")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("close", help="Meek-rule closure of a mixed graph")
    s.add_argument("graph")
    s.add_argument("--rules", default="1234", help="rule digits, e.g. 124")
    s.add_argument("--naive", action="store_true", help="global rescan scheduler")
    s.add_argument("--forbidden", help="pairs rule 1 may not orient, e.g. v2--v3,v4--v5")
    s.set_defaults(fn=cmd_close)

    s = sub.add_parser("essential", help="essential graph from an MPDAG")
    s.add_argument("graph")
    s.add_argument("--conventional", action="store_true")
    s.set_defaults(fn=cmd_essential)

    s = sub.add_parser("intervene", help="edges oriented by a perfect intervention on one vertex")
    s.add_argument("graph")
    s.add_argument("--node", required=True)
    s.add_argument("--ingoing", default="", help="revealed parents of --node, comma separated")
    s.add_argument("--conventional", action="store_true")
    s.set_defaults(fn=cmd_intervene)

    s = sub.add_parser("table", help="dump the single-edge closure table of a UCCG")
    s.add_argument("graph")
    s.set_defaults(fn=cmd_table)

    s = sub.add_parser("mecsize", help="number of DAGs in the equivalence class of a UCCG")
    s.add_argument("graph")
    s.add_argument("--no-closed-forms", action="store_true")
    s.add_argument("--conventional-root", action="store_true")
    s.add_argument("--brute-force", action="store_true")
    s.add_argument("--cap", type=int, default=9, help="vertex cap for --brute-force")
    s.set_defaults(fn=cmd_mecsize)

    s = sub.add_parser("design", help="pick the next intervention target")
    s.add_argument("graph")
    s.add_argument("--objective", choices=("minmax", "minmaxpt", "lb"), default="minmax")
    s.set_defaults(fn=cmd_design)

    s = sub.add_parser("active-sim", help="simulate interventions until full identification")
    s.add_argument("graph", nargs="?", help="UCCG skeleton; random graphs when omitted")
    s.add_argument("--policy", type=_policy, action="append", help="repeatable; default MinMax")
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--m", type=int)
    s.set_defaults(fn=cmd_active_sim)

    s = sub.add_parser("check", help="consistency of the directed edges of a PCCG")
    s.add_argument("graph")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("bench", help="run a timing sweep and emit CSV")
    s.add_argument("config")
    s.add_argument("-o", "--output")
    s.add_argument("--reps", type=int)
    s.add_argument("--deterministic", action="store_true", help="write zero timings (byte-stable CSV)")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("fixtures", help="run the byte-exact reference fixtures")
    s.add_argument("--write", metavar="DIR", help="also write the fixture graphs to DIR")
    s.set_defaults(fn=cmd_fixtures)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
        if a.command == "active-sim":
            if not a.policy:
                a.policy = ["MinMax"]
            if a.runs < 1:
                raise UsageError("--runs: must be positive")
            if a.graph is None and a.n < 1:
                raise UsageError("--n: must be positive")
        return a.fn(a)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (GraphFormatError, ValueError) as exc:
        print(f"cold: error: {exc}", file=sys.stderr)
        return 1
    except bench.BenchMismatch as exc:
        print(f"cold: bench aborted: {exc}", file=sys.stderr)
        return 2
