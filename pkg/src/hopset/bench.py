"""Seeded sweeps over instance files, written as CSV."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapExceeded
from .existential import ALGORITHMS, direct_hopset, folklore_exact_hopset, tradeoff_driver
from .instance import brute_force_opt, weighted_transitive_closure
from .io import parse_instance
from .junction import junction_tree_hopset
from .rounding import sqrt_opt_algorithm, two_hop_rounding

SWEEP_ALGORITHMS = ALGORITHMS + ("junction-tree-exact", "direct", "portfolio")
COLUMNS = ("instance", "algorithm", "seed", "cost", "feasible", "opt", "ratio", "error")
TIMED_COLUMNS = COLUMNS[:-1] + ("runtime_ms",) + COLUMNS[-1:]


@dataclass
class SweepConfig:
    """Instances are the ``*.txt`` files of ``directory`` (sorted) plus ``instances``."""

    directory: str | None = None
    instances: tuple = ()
    algorithms: tuple = ALGORITHMS
    seeds: tuple = (0,)
    out: str | None = None
    opt_cap: int = 18
    timing: bool = False
    threads: int = 1
    eps: str = "1/10"
    c: float = 4
    paths: list = field(default_factory=list, init=False)

    def __post_init__(self):
        for a in self.algorithms:
            if a not in SWEEP_ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; choose from {', '.join(SWEEP_ALGORITHMS)}")
        paths = [Path(p) for p in self.instances]
        if self.directory is not None:
            d = Path(self.directory)
            if not d.is_dir():
                raise ValueError(f"{d} is not a directory")
            paths += sorted(d.glob("*.txt"))
        self.paths = paths


def _run_one(name, inst, closure, seed, cfg: SweepConfig):
    if name == "junction-tree":
        return junction_tree_hopset(inst, closure)
    if name == "junction-tree-exact":
        return junction_tree_hopset(inst, closure, exact=True)
    if name == "sqrt-opt":
        return sqrt_opt_algorithm(inst, closure, seed, cfg.eps)
    if name == "two-hop":
        return two_hop_rounding(inst, closure, cfg.c, seed, cfg.eps)
    if name == "folklore":
        return folklore_exact_hopset(inst, closure, None, seed)
    if name == "direct":
        return direct_hopset(inst, closure)
    return tradeoff_driver(inst, closure, seed, eps=cfg.eps, c=cfg.c).chosen


def _ratio(cost, opt) -> str:
    if cost is None or opt is None:
        return ""
    if opt == 0:
        return "1.000000" if cost == 0 else ""
    return f"{cost / opt:.6f}"


def _instance_rows(path: Path, cfg: SweepConfig) -> list:
    rows = []
    try:
        inst = parse_instance(path)
        closure = weighted_transitive_closure(inst)
    except Exception as exc:  # one bad file yields error rows, not an aborted sweep
        return [dict(instance=path.name, algorithm=a, seed=s, cost="", feasible="", opt="", ratio="",
                     runtime_ms="", error=f"{type(exc).__name__}: {exc}")
                for a in cfg.algorithms for s in cfg.seeds]
    try:
        opt = brute_force_opt(inst, closure, cfg.opt_cap).cost
    except CapExceeded:
        opt = None
    for a in cfg.algorithms:
        for s in cfg.seeds:
            start = time.perf_counter()
            cost, feasible, error = None, None, ""
            try:
                sol = _run_one(a, inst, closure, s, cfg)
                cost, feasible = sol.cost, sol.feasible
            except Exception as exc:
                error = f"{type(exc).__name__}: {exc}"
            ms = (time.perf_counter() - start) * 1000
            rows.append(dict(instance=path.name, algorithm=a, seed=s,
                             cost="" if cost is None else cost,
                             feasible="" if feasible is None else int(feasible),
                             opt="" if opt is None else opt, ratio=_ratio(cost, opt),
                             runtime_ms=f"{ms:.1f}", error=error))
    return rows


def run_sweep(cfg: SweepConfig) -> list:
    """One row per (instance, algorithm, seed) in that order; writes ``cfg.out`` if set.

    ``runtime_ms`` is only emitted with ``timing`` so that reruns are
    byte-identical by default.
    """
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            chunks = list(pool.map(lambda p: _instance_rows(p, cfg), cfg.paths))
    else:
        chunks = [_instance_rows(p, cfg) for p in cfg.paths]
    rows = [r for chunk in chunks for r in chunk]
    if cfg.out is not None:
        Path(cfg.out).write_text(format_csv(rows, cfg.timing))
    return rows


def format_csv(rows, timing: bool = False) -> str:
    cols = TIMED_COLUMNS if timing else COLUMNS
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
