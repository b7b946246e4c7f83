"""Problem instances, weighted transitive closure, hop-bounded distances and
the exhaustive optimal-hopset oracles."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceeded, ForeignEdge, InfeasibleDemand, MalformedInput

INF = math.inf
MAX_LENGTH = 2**32 - 2


@dataclass(frozen=True)
class Stretch:
    """Distance bound given as a multiple of the true distance, resolved at load."""

    factor: Fraction

    def resolve(self, d: int) -> int:
        return math.floor(self.factor * d)


@dataclass(frozen=True)
class HopsetInstance:
    """A Generalized beta-Hopset instance.

    ``edges`` holds ``(u, v, length)`` triples sorted by ``(u, v)``; undirected
    inputs carry both orientations.  ``dist[k]`` is the distance bound of
    ``demands[k]``.  Before normalization a bound may also be ``None`` (exact)
    or a :class:`Stretch`.
    """

    n: int
    beta: int
    edges: tuple
    demands: tuple
    dist: tuple
    directed: bool = True

    @cached_property
    def length(self) -> dict:
        return {(u, v): l for u, v, l in self.edges}

    @cached_property
    def distances(self) -> tuple:
        return all_pairs_distances(self.n, self.edges)

    @property
    def k(self) -> int:
        return len(self.demands)

    def arcs(self) -> list:
        return list(self.edges)


def _dijkstra(n: int, adj: Sequence[Sequence[tuple]], source: int) -> list:
    dist = [INF] * n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, l in adj[u]:
            nd = d + l
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def all_pairs_distances(n: int, arcs: Iterable[tuple]) -> tuple:
    """Exact shortest-path distances ``d[u][v]`` (``INF`` when unreachable)."""
    adj = [[] for _ in range(n)]
    for u, v, l in arcs:
        adj[u].append((v, l))
    return tuple(tuple(_dijkstra(n, adj, s)) for s in range(n))


def _check_int(value, what, line=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInput(f"{what} must be an integer, got {value!r}", line)
    return value


def normalize_instance(raw: HopsetInstance) -> HopsetInstance:
    """Validate ``raw`` and bring it to normal form.

    Duplicate arcs collapse to their minimum length, every arc length becomes
    the true distance between its endpoints, exact/stretch bounds are resolved,
    repeated demands keep their tightest bound, and infeasible demands raise
    :class:`InfeasibleDemand`.
    """
    n = _check_int(raw.n, "vertex count")
    beta = _check_int(raw.beta, "hopbound")
    if n < 1:
        raise MalformedInput("vertex count must be positive")
    if beta < 1:
        raise MalformedInput("hopbound must be at least 1")

    best: dict = {}
    for e in raw.edges:
        if len(e) != 3:
            raise MalformedInput(f"edge {e!r} is not a (u, v, length) triple")
        u, v, l = e
        for x in (u, v):
            _check_int(x, "vertex id")
            if not 0 <= x < n:
                raise MalformedInput(f"vertex id {x} out of range [0, {n})")
        _check_int(l, "edge length")
        if l < 0 or l > MAX_LENGTH:
            raise MalformedInput(f"edge length {l} outside [0, {MAX_LENGTH}]")
        if u == v:
            raise MalformedInput(f"self-loop at vertex {u}")
        pairs = [(u, v)] if raw.directed else [(u, v), (v, u)]
        for p in pairs:
            if p not in best or l < best[p]:
                best[p] = l

    arcs = [(u, v, l) for (u, v), l in best.items()]
    d = all_pairs_distances(n, arcs)
    edges = tuple(sorted((u, v, d[u][v]) for u, v, _ in arcs))

    if len(raw.dist) != len(raw.demands):
        raise MalformedInput("every demand needs exactly one distance bound")
    bounds: dict = {}
    for (s, t), bound in zip(raw.demands, raw.dist):
        for x in (s, t):
            _check_int(x, "vertex id")
            if not 0 <= x < n:
                raise MalformedInput(f"demand vertex {x} out of range [0, {n})")
        if s == t:
            raise MalformedInput(f"demand ({s}, {t}) has identical endpoints")
        dst = d[s][t]
        if dst == INF:
            raise InfeasibleDemand(s, t, "target unreachable")
        if bound is None:
            bound = dst
        elif isinstance(bound, Stretch):
            bound = bound.resolve(dst)
        else:
            _check_int(bound, "distance bound")
        if bound < dst:
            raise InfeasibleDemand(s, t, f"bound {bound} below distance {dst}")
        if (s, t) not in bounds or bound < bounds[(s, t)]:
            bounds[(s, t)] = bound

    inst = HopsetInstance(
        n=n,
        beta=beta,
        edges=edges,
        demands=tuple(bounds),
        dist=tuple(bounds.values()),
        directed=raw.directed,
    )
    inst.__dict__["distances"] = d
    return inst


def make_instance(n, edges, demands, beta, directed=True) -> HopsetInstance:
    """Build a normalized instance; ``demands`` holds ``(s, t, bound)`` triples."""
    raw = HopsetInstance(
        n=n,
        beta=beta,
        edges=tuple(tuple(e) for e in edges),
        demands=tuple((s, t) for s, t, _ in demands),
        dist=tuple(b for _, _, b in demands),
        directed=directed,
    )
    return normalize_instance(raw)


@dataclass(frozen=True)
class WeightedClosure:
    """The weighted transitive closure of an instance graph.

    ``edges`` is E_M in lexicographic order, ``base`` the input arcs E and
    ``candidates`` the purchasable arcs E_M minus E.
    """

    n: int
    edges: tuple
    length: dict = field(repr=False)
    base: frozenset = field(repr=False)
    candidates: tuple = field(repr=False)
    dist: tuple = field(repr=False)

    @cached_property
    def candidate_set(self) -> frozenset:
        return frozenset(self.candidates)

    def cost(self, e) -> int:
        return 0 if e in self.base else 1

    def cost_of(self, F: Iterable) -> int:
        return sum(1 for e in set(F) if e in self.candidate_set)

    def arcs(self, edges: Iterable | None = None) -> list:
        if edges is None:
            edges = self.edges
        return [(u, v, self.length[(u, v)]) for u, v in edges]

    @cached_property
    def _out(self) -> tuple:
        out = [[] for _ in range(self.n)]
        for u, v in self.edges:
            out[u].append((u, v))
        return tuple(tuple(x) for x in out)

    @cached_property
    def _in(self) -> tuple:
        inn = [[] for _ in range(self.n)]
        for u, v in self.edges:
            inn[v].append((u, v))
        return tuple(tuple(x) for x in inn)

    def out_star(self, v: int) -> tuple:
        return self._out[v]

    def in_star(self, v: int) -> tuple:
        return self._in[v]

    def hop_table_from(self, s: int, beta: int) -> list:
        """``table[i][v]`` for paths inside E_M leaving ``s``.

        Every reachable pair of the closure is joined by a single arc of exact
        length, so the table is flat from one hop on.
        """
        zero = [INF] * self.n
        zero[s] = 0
        one = list(self.dist[s])
        return [zero] + [one] * beta

    def hop_table_to(self, t: int, beta: int) -> list:
        zero = [INF] * self.n
        zero[t] = 0
        one = [self.dist[u][t] for u in range(self.n)]
        return [zero] + [one] * beta


def weighted_transitive_closure(inst: HopsetInstance) -> WeightedClosure:
    d = inst.distances
    n = inst.n
    edges = tuple((u, v) for u in range(n) for v in range(n) if u != v and d[u][v] != INF)
    length = {(u, v): d[u][v] for u, v in edges}
    base = frozenset((u, v) for u, v, _ in inst.edges)
    candidates = tuple(e for e in edges if e not in base)
    return WeightedClosure(n=n, edges=edges, length=length, base=base, candidates=candidates, dist=d)


def hop_distance_table(n: int, arcs: Iterable[tuple], source: int, beta: int) -> list:
    """``table[i][v]``: shortest ``source -> v`` length using at most ``i`` arcs."""
    arcs = list(arcs)
    cur = [INF] * n
    cur[source] = 0
    table = [cur]
    for i in range(beta):
        nxt = cur[:]
        for u, v, l in arcs:
            du = cur[u]
            if du != INF and du + l < nxt[v]:
                nxt[v] = du + l
        if nxt == cur:
            table.extend([cur] * (beta - i))
            break
        table.append(nxt)
        cur = nxt
    return table


def hop_bounded_distance(arcs: Iterable[tuple], s: int, t: int, beta: int, n: int | None = None):
    """Minimum length of an ``s -> t`` path with at most ``beta`` arcs, or ``INF``."""
    arcs = list(arcs)
    if n is None:
        n = 1 + max([s, t] + [max(u, v) for u, v, _ in arcs])
    return hop_distance_table(n, arcs, s, beta)[beta][t]


def reverse_arcs(arcs: Iterable[tuple]) -> list:
    return [(v, u, l) for u, v, l in arcs]


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class DemandRecord:
    s: int
    t: int
    dist: int
    settled: bool
    hops: int | None
    length: int | None

    def as_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "settled": self.settled, "hops": self.hops, "length": self.length}


@dataclass(frozen=True)
class HopsetReport:
    records: tuple
    cost: int

    @property
    def feasible(self) -> bool:
        return all(r.settled for r in self.records)

    @property
    def settled(self) -> tuple:
        return tuple(r.settled for r in self.records)


def _check_foreign(closure: WeightedClosure, H) -> list:
    H = sorted(set(H))
    for e in H:
        if e not in closure.candidate_set:
            raise ForeignEdge(f"edge {e} is not a candidate closure edge")
    return H


def verify_hopset(inst: HopsetInstance, closure: WeightedClosure, H: Iterable) -> HopsetReport:
    """Check every demand against ``G + H`` with the instance hopbound."""
    H = _check_foreign(closure, H)
    arcs = inst.arcs() + closure.arcs(H)
    tables = {}
    records = []
    for (s, t), bound in zip(inst.demands, inst.dist):
        if s not in tables:
            tables[s] = hop_distance_table(inst.n, arcs, s, inst.beta)
        table = tables[s]
        hops = next((i for i in range(inst.beta + 1) if table[i][t] <= bound), None)
        length = table[inst.beta][t]
        records.append(
            DemandRecord(s, t, bound, hops is not None, hops, None if length == INF else int(length))
        )
    return HopsetReport(tuple(records), len(H))


def settled_demands(inst: HopsetInstance, arcs: Sequence[tuple], indices: Iterable[int] | None = None) -> list:
    """Indices of demands settled inside the arc set ``arcs``."""
    if indices is None:
        indices = range(inst.k)
    tables = {}
    out = []
    for k in indices:
        s, t = inst.demands[k]
        if s not in tables:
            tables[s] = hop_distance_table(inst.n, arcs, s, inst.beta)
        if tables[s][inst.beta][t] <= inst.dist[k]:
            out.append(k)
    return out


def unsettled_by_base(inst: HopsetInstance) -> list:
    done = set(settled_demands(inst, inst.arcs()))
    return [k for k in range(inst.k) if k not in done]


@dataclass
class HopsetSolution:
    """A verified hopset together with its provenance."""

    edges: tuple
    cost: int
    settled: tuple
    algorithm: str
    seed: int | None = None
    params: dict = field(default_factory=dict)
    report: HopsetReport | None = field(default=None, repr=False)
    details: dict = field(default_factory=dict, repr=False)

    @property
    def feasible(self) -> bool:
        return all(self.settled)


def make_solution(inst, closure, H, algorithm, seed=None, params=None, details=None) -> HopsetSolution:
    report = verify_hopset(inst, closure, H)
    return HopsetSolution(
        edges=tuple(sorted(set(H))),
        cost=report.cost,
        settled=report.settled,
        algorithm=algorithm,
        seed=seed,
        params=dict(params or {}),
        report=report,
        details=dict(details or {}),
    )


# --------------------------------------------------------------------------
# useful edges and valid paths


def demand_edges(inst: HopsetInstance, closure: WeightedClosure, k: int) -> list:
    """Closure arcs lying on some walk that settles demand ``k`` inside G_M."""
    s, t = inst.demands[k]
    bound, beta = inst.dist[k], inst.beta
    fwd = closure.hop_table_from(s, beta)
    bwd = closure.hop_table_to(t, beta)
    out = []
    for (u, v) in closure.edges:
        l = closure.length[(u, v)]
        for i in range(beta):
            if fwd[i][u] + l + bwd[beta - 1 - i][v] <= bound:
                out.append((u, v))
                break
    return out


def enumerate_valid_paths(closure: WeightedClosure, s: int, t: int, beta: int, bound: int,
                          allowed: Iterable | None = None, limit: int | None = None):
    """All simple ``s -> t`` paths with at most ``beta`` arcs and length at most ``bound``.

    Paths are tuples of arcs drawn from ``allowed`` (default: all of E_M).
    Raises :class:`CapExceeded` past ``limit`` paths.
    """
    if allowed is None:
        out = closure._out
    else:
        tmp = [[] for _ in range(closure.n)]
        for u, v in sorted(set(allowed)):
            tmp[u].append((u, v))
        out = tmp
    dist = closure.dist
    found = []
    path: list = []
    onpath = {s}

    def rec(u, length):
        if u == t:
            found.append(tuple(path))
            if limit is not None and len(found) > limit:
                raise CapExceeded(f"more than {limit} valid paths")
            return
        if len(path) >= beta:
            return
        for e in out[u]:
            v = e[1]
            if v in onpath:
                continue
            nl = length + closure.length[e]
            if nl + dist[v][t] > bound:
                continue
            if v != t and len(path) + 2 > beta:
                continue
            path.append(e)
            onpath.add(v)
            rec(v, nl)
            path.pop()
            onpath.discard(v)

    if dist[s][t] <= bound:
        rec(s, 0)
    return found


# --------------------------------------------------------------------------
# exhaustive oracles


def brute_force_opt(inst: HopsetInstance, closure: WeightedClosure, size_cap: int = 20) -> HopsetSolution:
    """Minimum hopset by enumerating candidate subsets in increasing size.

    Only candidates lying on some settling walk are enumerated; a minimum
    solution never contains any other arc.  Among minimum solutions the
    lexicographically smallest edge tuple is returned.
    """
    todo = unsettled_by_base(inst)
    useful = sorted({e for k in todo for e in demand_edges(inst, closure, k)} & closure.candidate_set)
    if len(useful) > size_cap:
        raise CapExceeded(f"{len(useful)} candidate edges exceed the cap of {size_cap}")
    base = inst.arcs()
    by_source: dict = {}
    for k in todo:
        by_source.setdefault(inst.demands[k][0], []).append(k)

    def feasible(H):
        arcs = base + closure.arcs(H)
        for s, ks in by_source.items():
            row = hop_distance_table(inst.n, arcs, s, inst.beta)[inst.beta]
            for k in ks:
                if row[inst.demands[k][1]] > inst.dist[k]:
                    return False
        return True

    for size in range(len(useful) + 1):
        for H in itertools.combinations(useful, size):
            if feasible(H):
                return make_solution(inst, closure, H, "brute-force", params={"size_cap": size_cap})
    raise AssertionError("the full useful candidate set always settles every demand")


def exhaustive_opt_dfs(inst: HopsetInstance, closure: WeightedClosure, path_limit: int = 200000) -> HopsetSolution:
    """Minimum hopset by iterative-deepening search over valid-path edge sets.

    Independent of :func:`brute_force_opt`: feasibility is decided by containing
    the candidate arcs of some enumerated valid path, never by relaxation.
    """
    todo = unsettled_by_base(inst)
    options = []
    for k in todo:
        s, t = inst.demands[k]
        sets = {
            frozenset(e for e in p if e in closure.candidate_set)
            for p in enumerate_valid_paths(closure, s, t, inst.beta, inst.dist[k], limit=path_limit)
        }
        minimal = [a for a in sets if not any(b < a for b in sets)]
        options.append(sorted(minimal, key=lambda a: (len(a), sorted(a))))

    def first_open(H):
        for i, opts in enumerate(options):
            if not any(a <= H for a in opts):
                return i
        return None

    for budget in range(len(closure.candidates) + 1):
        found = []
        seen = set()

        def rec(H):
            if H in seen:
                return
            seen.add(H)
            i = first_open(H)
            if i is None:
                found.append(tuple(sorted(H)))
                return
            for a in options[i]:
                if len(H | a) <= budget:
                    rec(H | a)

        rec(frozenset())
        if found:
            best = min(found, key=lambda h: (len(h), h))
            return make_solution(inst, closure, best, "exhaustive-dfs")
    raise AssertionError("unreachable: all candidates settle every demand")


def _minimal_path_sets(inst: HopsetInstance, closure: WeightedClosure, k: int, path_limit: int) -> list:
    s, t = inst.demands[k]
    sets = {
        frozenset(e for e in p if e in closure.candidate_set)
        for p in enumerate_valid_paths(closure, s, t, inst.beta, inst.dist[k], limit=path_limit)
    }
    return sorted((a for a in sets if not any(b < a for b in sets)), key=lambda a: (len(a), sorted(a)))


def shared_split_opt(inst: HopsetInstance, closure: WeightedClosure, shared_cap: int = 18,
                     path_limit: int = 200000) -> HopsetSolution:
    """Minimum hopset by enumerating only the arcs several demands can use.

    An arc occurring in the minimal valid-path sets of one demand only is
    private to it.  For a fixed set C of shared arcs each demand independently
    pays its cheapest minimal set's private remainder, so the optimum is
    ``min_C |C| + sum_d min_a |a - C|``, scanned over all C as bitmasks.
    """
    import numpy as np

    todo = unsettled_by_base(inst)
    options = {k: _minimal_path_sets(inst, closure, k, path_limit) for k in todo}
    users: dict = {}
    for k, opts in options.items():
        for a in opts:
            for e in a:
                users.setdefault(e, set()).add(k)
    shared = sorted(e for e, ks in users.items() if len(ks) > 1)
    if len(shared) > shared_cap:
        raise CapExceeded(f"{len(shared)} shared candidate arcs exceed the cap of {shared_cap}")
    bit = {e: 1 << i for i, e in enumerate(shared)}
    U = np.arange(1 << len(shared), dtype=np.int64)
    total = np.zeros(len(U), dtype=np.int64)
    for x in range(len(shared)):
        total += (U >> x) & 1
    big = np.int64(1 << 40)
    for k in todo:
        best = np.full(len(U), big, dtype=np.int64)
        for a in options[k]:
            sm = sum(bit.get(e, 0) for e in a)
            private = sum(1 for e in a if e not in bit)
            best = np.minimum(best, np.where((U & sm) == sm, private, big))
        total += best
    c = int(np.argmin(total))
    H = {e for e in shared if c & bit[e]}
    for k in todo:
        a = min((a for a in options[k] if all(e in H or e not in bit for e in a)),
                key=lambda a: (sum(1 for e in a if e not in bit), sorted(a)))
        H |= a
    return make_solution(inst, closure, sorted(H), "shared-split", params={"shared": len(shared)})
