"""Timing sweeps that pit table-driven methods against their conventional baselines.

Config is flat ``key=value`` text, one per line, ``#`` comments allowed::

    experiment = essential          # essential | minmax | design | mecsize
    n = 100, 200, 400
    avg_degree = 2.2                # or: m = ..., or: density = ...
    methods = cold, conventional
    reps = 5
    instances = 3
    seed = 0

CSV columns: ``experiment,n,m,seed,method,wall_time_s,output_size``.
``wall_time_s`` is the median over ``reps`` runs of the algorithm alone;
instance generation is not timed. Before any row of a cell is emitted, the
outputs of all methods on that instance are compared and a mismatch aborts
the sweep.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from . import meek
from .design import select_lb_node, select_minmax_node
from .dp import DpTable, essential_edges_from_mpdag
from .graph import MixedGraph, random_chordal, random_mpdag
from .mec import count_mec

__all__ = ["BenchRecord", "BenchConfig", "BenchMismatch", "CSV_COLUMNS", "EXPERIMENTS", "parse_config", "bench_sweep", "to_csv", "time_median"]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("experiment", "n", "m", "seed", "method", "wall_time_s", "output_size")


@dataclass(frozen=True)
class BenchRecord:
    experiment: str
    n: int
    m: int
    seed: int
    method: str
    wall_time: float
    output_size: int


class BenchMismatch(AssertionError):
    pass


def _essential_cold(g):
    return essential_edges_from_mpdag(g)


def _essential_conv(g):
    return meek.meek_closure(g.edges, meek.M123, naive=True)


def _size_directed(out) -> int:
    return sum(1 for e in out if e.directed)


def _minmax_cold(g):
    return select_minmax_node(g, DpTable(g))


def _minmax_conv(g):
    return select_minmax_node(g, conventional=True)


def _minmaxpt(g):
    return select_minmax_node(g, DpTable(g), early_stop=True)


def _lb(g):
    return select_lb_node(g, DpTable(g))


@dataclass(frozen=True)
class Experiment:
    generate: Callable[[int, int, int], MixedGraph]
    methods: dict[str, Callable[[MixedGraph], Any]]
    size: Callable[[Any], int]
    # projection compared across methods; None means "not compared"
    compare: Optional[Callable[[Any], Any]] = lambda out: out


EXPERIMENTS: dict[str, Experiment] = {
    "essential": Experiment(random_mpdag, {"cold": _essential_cold, "conventional": _essential_conv}, _size_directed),
    "minmax": Experiment(random_chordal, {"cold": _minmax_cold, "conventional": _minmax_conv}, lambda out: out[1]),
    "design": Experiment(
        random_chordal,
        {"minmax": _minmax_cold, "minmaxpt": _minmaxpt, "lb": _lb},
        lambda out: out[0],
        None,
    ),
    "mecsize": Experiment(
        random_chordal,
        {"cold": count_mec, "conventional-root": lambda g: count_mec(g, conventional_root=True)},
        int,
    ),
}


@dataclass
class BenchConfig:
    experiment: str = "essential"
    ns: list[int] = field(default_factory=lambda: [100])
    ms: Optional[list[int]] = None
    avg_degree: Optional[list[float]] = None
    density: Optional[list[float]] = None
    methods: Optional[list[str]] = None
    reps: int = 5
    instances: int = 1
    seed: int = 0

    def cells(self) -> list[tuple[int, int]]:
        out = []
        for n in self.ns:
            if self.ms is not None:
                out += [(n, m) for m in self.ms]
            elif self.density is not None:
                out += [(n, round(d * n * (n - 1) / 2)) for d in self.density]
            else:
                out += [(n, round(a * n)) for a in (self.avg_degree or [2.0])]
        return out


def _ints(v: str) -> list[int]:
    return [int(x) for x in v.replace(",", " ").split()]


def _floats(v: str) -> list[float]:
    return [float(x) for x in v.replace(",", " ").split()]


def parse_config(text: str) -> BenchConfig:
    cfg = BenchConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw.strip()!r}")
        k, v = (x.strip() for x in s.split("=", 1))
        try:
            if k == "experiment":
                cfg.experiment = v
            elif k == "n":
                cfg.ns = _ints(v)
            elif k == "m":
                cfg.ms = _ints(v)
            elif k == "avg_degree":
                cfg.avg_degree = _floats(v)
            elif k == "density":
                cfg.density = _floats(v)
            elif k == "methods":
                cfg.methods = [x for x in v.replace(",", " ").split()]
            elif k in ("reps", "instances", "seed"):
                setattr(cfg, k, int(v))
            else:
                raise ValueError(f"unknown key {k!r}")
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: {exc}") from exc
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    known = EXPERIMENTS[cfg.experiment].methods
    for mth in cfg.methods or []:
        if mth not in known:
            raise ValueError(f"experiment {cfg.experiment} has no method {mth!r}; choose from {', '.join(known)}")
    if cfg.reps < 1 or cfg.instances < 1:
        raise ValueError("reps and instances must be positive")
    return cfg


def time_median(fn: Callable[[], Any], reps: int = 5) -> tuple[float, Any]:
    """Median wall time of ``reps`` calls and the last result."""
    times = []
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def _run_cell(cfg: BenchConfig, n: int, m: int, seed: int) -> list[BenchRecord]:
    exp = EXPERIMENTS[cfg.experiment]
    try:
        g = exp.generate(n, m, seed)
    except ValueError as exc:
        log.warning("skipping %s n=%d m=%d seed=%d: %s", cfg.experiment, n, m, seed, exc)
        return []
    names = cfg.methods or list(exp.methods)
    timed = {}
    for name in names:
        fn = exp.methods[name]
        timed[name] = time_median(lambda: fn(g), cfg.reps)
    if exp.compare is not None:
        ref_name = names[0]
        ref = exp.compare(timed[ref_name][1])
        for name in names[1:]:
            if exp.compare(timed[name][1]) != ref:
                raise BenchMismatch(f"{cfg.experiment} n={n} m={m} seed={seed}: {name} disagrees with {ref_name}")
    elif cfg.experiment == "design":
        sel = {k: v[1][0] for k, v in timed.items()}
        if "minmax" in sel and "minmaxpt" in sel and sel["minmax"] != sel["minmaxpt"]:
            raise BenchMismatch(f"design n={n} m={m} seed={seed}: early stopping changed the selection")
    return [BenchRecord(cfg.experiment, n, m, seed, name, timed[name][0], exp.size(timed[name][1])) for name in names]


def bench_sweep(cfg: BenchConfig, threads: Optional[int] = None) -> list[BenchRecord]:
    if threads is None:
        threads = int(os.environ.get("COLD_THREADS", "1") or 1)
    jobs = [(n, m, cfg.seed + k) for n, m in cfg.cells() for k in range(cfg.instances)]
    if threads <= 1:
        parts = [_run_cell(cfg, *j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda j: _run_cell(cfg, *j), jobs))
    return [r for part in parts for r in part]


def to_csv(records: list[BenchRecord], deterministic: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        t = 0.0 if deterministic else r.wall_time
        w.writerow([r.experiment, r.n, r.m, r.seed, r.method, f"{t:.6f}", r.output_size])
    return buf.getvalue()
