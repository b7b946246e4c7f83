"""Plain-text instances, JSON solutions and random instance generation."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import MalformedInput
from .instance import (
    INF,
    HopsetInstance,
    HopsetSolution,
    Stretch,
    all_pairs_distances,
    hop_bounded_distance,
    normalize_instance,
)
from .rng import make_rng

MAGIC = "HOPSET"
VERSION = "1"


def _int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedInput(f"{what} must be an integer, got {token!r}", line) from None


def _bound(token: str, line: int):
    if token == "-1":
        return None
    if token.startswith("x"):
        try:
            factor = Fraction(token[1:])
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"bad stretch token {token!r}", line) from None
        if factor < 0:
            raise MalformedInput("stretch factor must be nonnegative", line)
        return Stretch(factor)
    value = _int(token, "distance bound", line)
    if value < 0:
        raise MalformedInput("distance bound must be nonnegative or -1", line)
    return value


def parse_instance_text(text: str) -> HopsetInstance:
    """Parse and normalize an instance; errors name the offending line."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise MalformedInput("empty instance", 1)
    it = iter(lines)
    no, head = next(it)
    if len(head) != 3 or head[0] != MAGIC or head[1] != VERSION or head[2] not in ("directed", "undirected"):
        raise MalformedInput(f"expected '{MAGIC} {VERSION} <directed|undirected>'", no)
    directed = head[2] == "directed"
    try:
        no, sizes = next(it)
    except StopIteration:
        raise MalformedInput("missing size line", no + 1) from None
    if len(sizes) != 4:
        raise MalformedInput("size line needs '<n> <m> <k> <beta>'", no)
    n, m, k, beta = (_int(x, "size", no) for x in sizes)
    if n < 1 or m < 0 or k < 0 or beta < 1:
        raise MalformedInput("need n >= 1, m >= 0, k >= 0, beta >= 1", no)
    edges, demands, bounds = [], [], []
    for what, count in (("edge", m), ("demand", k)):
        for _ in range(count):
            try:
                no, toks = next(it)
            except StopIteration:
                raise MalformedInput(f"file ends before all {what} lines", no + 1) from None
            if len(toks) != 3:
                raise MalformedInput(f"{what} line needs three fields", no)
            u = _int(toks[0], "vertex id", no)
            v = _int(toks[1], "vertex id", no)
            for x in (u, v):
                if not 0 <= x < n:
                    raise MalformedInput(f"vertex id {x} out of range [0, {n})", no)
            if what == "edge":
                l = _int(toks[2], "edge length", no)
                if l < 0:
                    raise MalformedInput("edge length must be nonnegative", no)
                if u == v:
                    raise MalformedInput(f"self-loop at vertex {u}", no)
                edges.append((u, v, l))
            else:
                if u == v:
                    raise MalformedInput(f"demand ({u}, {v}) has identical endpoints", no)
                demands.append((u, v))
                bounds.append(_bound(toks[2], no))
    extra = next(it, None)
    if extra is not None:
        raise MalformedInput("unexpected trailing content", extra[0])
    raw = HopsetInstance(n=n, beta=beta, edges=tuple(edges), demands=tuple(demands),
                         dist=tuple(bounds), directed=directed)
    return normalize_instance(raw)


def parse_instance(path) -> HopsetInstance:
    return parse_instance_text(Path(path).read_text())


def format_instance(inst: HopsetInstance) -> str:
    """Text form of a normalized instance.

    Undirected instances are written with one line per unordered pair.
    """
    edges = inst.edges
    if not inst.directed:
        edges = [(u, v, l) for u, v, l in edges if u < v]
    out = [f"{MAGIC} {VERSION} {'directed' if inst.directed else 'undirected'}",
           f"{inst.n} {len(edges)} {inst.k} {inst.beta}"]
    out += [f"{u} {v} {l}" for u, v, l in edges]
    out += [f"{s} {t} {b}" for (s, t), b in zip(inst.demands, inst.dist)]
    return "\n".join(out) + "\n"


def write_instance(inst: HopsetInstance, path) -> None:
    Path(path).write_text(format_instance(inst))


# --------------------------------------------------------------------------
# solutions


def solution_to_dict(sol: HopsetSolution, runtime_ms=None) -> dict:
    out = {
        "algorithm": sol.algorithm,
        "seed": sol.seed,
        "cost": sol.cost,
        "feasible": sol.feasible,
        "edges": [list(e) for e in sol.edges],
        "per_demand": [r.as_dict() for r in sol.report.records] if sol.report else [],
        "params": {k: _jsonable(v) for k, v in sol.params.items()},
    }
    if runtime_ms is not None:
        out["runtime_ms"] = runtime_ms
    if sol.details:
        out["details"] = _jsonable(sol.details)
    return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and v == INF:
        return "inf"
    return v


def dump_solution(sol: HopsetSolution, path, runtime_ms=None) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(sol, runtime_ms), indent=2) + "\n")


def load_solution_edges(path) -> list:
    data = json.loads(Path(path).read_text())
    edges = data["edges"] if isinstance(data, dict) else data
    return [tuple(e) for e in edges]


# --------------------------------------------------------------------------
# random instances


def random_instance(n: int, beta: int, seed: int, density: float = 0.3, max_length: int = 5,
                    demands: int = 4, directed: bool = True, exact_share: float = 0.5,
                    backbone: bool = False, hard: bool = False) -> HopsetInstance:
    """Random instance with reachable demands.

    With ``backbone`` a random Hamiltonian path is laid down first, which
    keeps sparse instances connected and hop distances long.  With ``hard``
    the demands are drawn first from pairs the input arcs cannot settle.  Each bound is
    either exact (with probability ``exact_share``) or a stretch in
    {1.25, 1.5, 2} of the true distance.
    """
    rng = make_rng(seed, "random-instance")
    chosen_edges = {}
    if backbone:
        order = [int(v) for v in rng.permutation(n)]
        for u, v in zip(order, order[1:]):
            chosen_edges[(u, v)] = int(rng.integers(1, max_length + 1))
    for u in range(n):
        for v in range(n):
            if u != v and (directed or u < v) and rng.random() < density:
                chosen_edges.setdefault((u, v), int(rng.integers(1, max_length + 1)))
    edges = [(u, v, l) for (u, v), l in sorted(chosen_edges.items())]
    if not directed:
        edges = [(min(u, v), max(u, v), l) for u, v, l in edges]
    both = edges if directed else edges + [(v, u, l) for u, v, l in edges]
    d = all_pairs_distances(n, both)
    pairs = [(s, t) for s in range(n) for t in range(n) if s != t and d[s][t] != INF]
    stretches = [Fraction(5, 4), Fraction(3, 2), Fraction(2)]
    drawn = []
    for s, t in pairs:
        bound = None if rng.random() < exact_share else Stretch(stretches[int(rng.integers(0, 3))])
        drawn.append((s, t, bound))
    if hard:
        # pairs that E alone cannot settle go first
        def open_in_base(item):
            s, t, bound = item
            limit = d[s][t] if bound is None else bound.resolve(d[s][t])
            return hop_bounded_distance(both, s, t, beta, n) > limit
        flags = [open_in_base(x) for x in drawn]
        order = [int(i) for i in rng.permutation(len(drawn))]
        order = [i for i in order if flags[i]] + [i for i in order if not flags[i]]
        chosen = [drawn[i] for i in sorted(order[:demands])]
    else:
        idx = rng.permutation(len(drawn))[: min(demands, len(drawn))]
        chosen = [drawn[i] for i in sorted(int(j) for j in idx)]
    raw = HopsetInstance(n=n, beta=beta, edges=tuple(edges), demands=tuple((s, t) for s, t, _ in chosen),
                         dist=tuple(b for _, _, b in chosen), directed=directed)
    return normalize_instance(raw)
