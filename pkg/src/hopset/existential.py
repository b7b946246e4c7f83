"""Sampling-based exact hopsets and the cheapest-of-all-algorithms driver."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ForeignEdge, HopsetError, WrongHopbound
from .instance import (
    HopsetInstance,
    HopsetSolution,
    WeightedClosure,
    hop_distance_table,
    make_solution,
    unsettled_by_base,
)
from .junction import junction_tree_hopset
from .lp.cutgen import DEFAULT_EPS, solve_hopset_lp
from .rng import derive_seed, make_rng
from .rounding import log_n, sqrt_opt_algorithm, two_hop_rounding

SAMPLING_RATE = 3


def sample_size(n: int, beta: int, rate: float = SAMPLING_RATE) -> int:
    return min(n, math.ceil(rate * (n / beta) * log_n(n)))


def folklore_exact_hopset(inst: HopsetInstance, closure: WeightedClosure, beta: int | None = None,
                          seed: int = 0, rate: float = SAMPLING_RATE) -> HopsetSolution:
    """Join every ordered pair of a random vertex sample, then patch leftovers.

    Why it works: let ``w = ceil(beta/2)`` and suppose the sample meets every
    run of ``w`` consecutive vertices of a shortest ``s -> t`` path.  The
    first sampled vertex ``x`` is then at most ``w - 1`` arcs after ``s`` and
    the last one ``y`` at most ``w - 1`` arcs before ``t``.  The closure arc
    ``(x, y)`` has the exact subpath length, so ``s -> x -> y -> t`` is a
    shortest path of at most ``2w - 1 <= beta`` hops.  A sample of size
    ``rate * (n/beta) * ln n`` misses a fixed run with probability about
    ``n^(-rate/2)``.  Any demand still off its true distance gets its direct
    arc, which makes the result exact with certainty.
    """
    beta = inst.beta if beta is None else beta
    if beta < 2:
        raise WrongHopbound(f"sampling construction needs hopbound >= 2, got {beta}")
    n = inst.n
    sample: list = []
    H: set = set()
    if beta < n:
        rng = make_rng(seed, "folklore")
        sample = sorted(int(v) for v in rng.permutation(n)[: sample_size(n, beta, rate)])
        members = set(sample)
        H = {e for e in closure.candidates if e[0] in members and e[1] in members}
    arcs = inst.arcs() + closure.arcs(sorted(H))
    tables = {}
    patched = []
    for s, t in inst.demands:
        if s not in tables:
            tables[s] = hop_distance_table(n, arcs, s, beta)
        if tables[s][beta][t] != closure.dist[s][t]:
            patched.append((s, t))
    H.update(patched)
    params = {"beta": beta, "rate": rate}
    details = {"sample": sample, "fallbacks": len(patched)}
    return make_solution(inst, closure, sorted(H), "folklore", seed, params, details)


def direct_hopset(inst: HopsetInstance, closure: WeightedClosure) -> HopsetSolution:
    """The direct closure arc of every demand E cannot settle; always feasible."""
    H = [inst.demands[k] for k in unsettled_by_base(inst)]
    return make_solution(inst, closure, H, "direct")


# --------------------------------------------------------------------------
# external constructions


_REGISTRY: dict = {}


@dataclass(frozen=True)
class ExternalEntry:
    name: str
    constructor: Callable


def register_external_construction(name: str, constructor: Callable) -> ExternalEntry:
    """Add ``constructor(inst, closure, seed) -> edges`` to the portfolio.

    Registering under an existing name replaces that entry.
    """
    if name in ALGORITHMS or name == "direct":
        raise ValueError(f"{name!r} is a built-in algorithm name")
    entry = ExternalEntry(name, constructor)
    _REGISTRY[name] = entry
    return entry


def unregister_external_construction(name: str) -> None:
    _REGISTRY.pop(name, None)


def registered_constructions() -> tuple:
    return tuple(_REGISTRY[k] for k in sorted(_REGISTRY))


# --------------------------------------------------------------------------
# portfolio


ALGORITHMS = ("junction-tree", "sqrt-opt", "folklore", "two-hop")


@dataclass
class PortfolioEntry:
    name: str
    seed: int
    cost: int | None
    feasible: bool
    runtime_ms: float
    solution: HopsetSolution | None = field(default=None, repr=False)
    error: str | None = None

    def as_row(self) -> dict:
        return {"name": self.name, "seed": self.seed, "cost": self.cost, "feasible": self.feasible,
                "runtime_ms": self.runtime_ms, "error": self.error}


@dataclass
class AlgorithmPortfolioResult:
    entries: list
    chosen: HopsetSolution

    @property
    def cost(self) -> int:
        return self.chosen.cost

    def entry(self, name: str) -> PortfolioEntry:
        return next(e for e in self.entries if e.name == name)


def applicable_algorithms(inst: HopsetInstance) -> tuple:
    out = ["junction-tree", "sqrt-opt"]
    if inst.beta >= 2:
        out.append("folklore")
    if inst.beta == 2:
        out.append("two-hop")
    return tuple(out)


def parse_mask(text: str | None) -> tuple | None:
    if text is None:
        return None
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    known = set(ALGORITHMS) | set(_REGISTRY)
    for x in names:
        if x not in known:
            raise ValueError(f"unknown algorithm {x!r}")
    return names


def tradeoff_driver(inst: HopsetInstance, closure: WeightedClosure, seed: int = 0, algo_mask=None,
                    eps=DEFAULT_EPS, c: float = 4, externals=None) -> AlgorithmPortfolioResult:
    """Run every selected construction, verify each, keep the cheapest feasible.

    ``algo_mask`` lists built-in and registered names; by default every
    built-in applicable to the hopbound runs, plus all registered entries.
    The direct-arc baseline always runs, so some entry is feasible.  Ties on
    cost go to the alphabetically first name.
    """
    if externals is None:
        externals = registered_constructions()
    ext = {e.name: e for e in externals}
    if algo_mask is None:
        names = list(applicable_algorithms(inst)) + sorted(ext)
    else:
        names = []
        for x in algo_mask:
            if x not in ALGORITHMS and x not in ext:
                raise ValueError(f"unknown algorithm {x!r}")
            if x in ALGORITHMS and x not in applicable_algorithms(inst):
                continue
            names.append(x)
    eps = Fraction(eps)
    lp_cache = {}

    def lp():
        if "lp" not in lp_cache:
            lp_cache["lp"] = solve_hopset_lp(inst, closure, eps) if unsettled_by_base(inst) else None
        return lp_cache["lp"]

    runners = {
        "junction-tree": lambda s: junction_tree_hopset(inst, closure),
        "sqrt-opt": lambda s: sqrt_opt_algorithm(inst, closure, s, eps, lp()),
        "folklore": lambda s: folklore_exact_hopset(inst, closure, None, s),
        "two-hop": lambda s: two_hop_rounding(inst, closure, c, s, eps, lp()),
        "direct": lambda s: direct_hopset(inst, closure),
    }

    entries = []
    for name in names + ["direct"]:
        sub = derive_seed(seed, name)
        start = time.perf_counter()
        sol, error = None, None
        try:
            if name in runners:
                sol = runners[name](sub)
            else:
                edges = ext[name].constructor(inst, closure, sub)
                sol = make_solution(inst, closure, sorted(set(map(tuple, edges))), name, sub)
        except ForeignEdge as exc:
            error = f"ForeignEdge: {exc}"
        except HopsetError as exc:
            if name in runners:
                raise
            error = f"{type(exc).__name__}: {exc}"
        ms = (time.perf_counter() - start) * 1000
        feasible = sol is not None and sol.feasible
        entries.append(PortfolioEntry(name, sub, None if sol is None else sol.cost, feasible, ms, sol, error))
    best = min((e for e in entries if e.feasible), key=lambda e: (e.cost, e.name))
    return AlgorithmPortfolioResult(entries, best.solution)


__all__ = [
    "ALGORITHMS",
    "AlgorithmPortfolioResult",
    "ExternalEntry",
    "PortfolioEntry",
    "SAMPLING_RATE",
    "applicable_algorithms",
    "direct_hopset",
    "folklore_exact_hopset",
    "parse_mask",
    "register_external_construction",
    "registered_constructions",
    "sample_size",
    "tradeoff_driver",
    "unregister_external_construction",
]
