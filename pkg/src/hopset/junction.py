"""Low-density junction trees and the greedy buying loop.

A junction tree is an in-arborescence into a root ``r`` (depth at most ``i``
hops) together with an out-arborescence from ``r`` (depth at most ``j``
hops), ``i + j <= beta``.  It settles every demand ``(s, t)`` whose
``s -> r -> t`` route inside the tree is short enough.  Buying the candidate
arcs of low-density trees (cost per settled demand) until nothing is left
open yields a hopset.

Trees live either in the closure G_M (arcs ``(u, v)``) or in the layered
graph, where ``beta + 1`` copies of every vertex turn hop counts into layers
and arcs ``(u, v, k)`` join ``u`` on layer ``k`` to ``v`` on layer ``k + 1``
(``u == v`` marks a zero-cost, zero-length padding arc).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, MalformedTree, NoTree
from .instance import (
    INF,
    HopsetInstance,
    HopsetSolution,
    WeightedClosure,
    enumerate_valid_paths,
    hop_distance_table,
    make_solution,
    reverse_arcs,
    settled_demands,
    unsettled_by_base,
)

FRONTIER_CAP = 10_000


# --------------------------------------------------------------------------
# layered graph


@dataclass(frozen=True)
class LayeredGraph:
    """``beta + 1`` layers of the closure; vertex ``u`` on layer ``i`` has id ``i*n + u``."""

    inst: HopsetInstance = field(repr=False)
    closure: WeightedClosure = field(repr=False)
    n: int
    beta: int
    arcs: tuple

    @property
    def num_vertices(self) -> int:
        return (self.beta + 1) * self.n

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    def vertex_id(self, u: int, layer: int) -> int:
        return layer * self.n + u

    @property
    def demands(self) -> tuple:
        return tuple((self.vertex_id(s, 0), self.vertex_id(t, self.beta)) for s, t in self.inst.demands)

    @property
    def dist(self) -> tuple:
        return self.inst.dist

    def length(self, arc) -> int:
        u, v, _ = arc
        return 0 if u == v else self.closure.length[(u, v)]

    def cost(self, arc, bought=frozenset()) -> int:
        u, v, _ = arc
        return int(u != v and (u, v) in self.closure.candidate_set and (u, v) not in bought)


def build_layered_graph(inst: HopsetInstance, closure: WeightedClosure) -> LayeredGraph:
    arcs = []
    for k in range(inst.beta):
        arcs.extend((u, v, k) for u, v in closure.edges)
        arcs.extend((u, u, k) for u in range(inst.n))
    return LayeredGraph(inst, closure, inst.n, inst.beta, tuple(sorted(arcs, key=lambda a: (a[2], a[0], a[1]))))


def lift_path(path, beta: int) -> list:
    """Map a nonempty ``<= beta``-arc closure path to an exactly-``beta``-arc
    layered path: real arcs first, then padding at the target."""
    if not path or len(path) > beta:
        raise ValueError("path must have between 1 and beta arcs")
    t = path[-1][1]
    return [(u, v, k) for k, (u, v) in enumerate(path)] + [(t, t, k) for k in range(len(path), beta)]


# --------------------------------------------------------------------------
# junction trees


@dataclass(frozen=True)
class JunctionTree:
    """Root, split ``(i, j)``, in/out arc sets and the claimed settled demands.

    ``layered`` trees carry arcs ``(u, v, k)`` and a root on layer ``i``;
    closure trees carry arcs ``(u, v)``.  ``cost`` counts candidate arcs
    not yet bought; for layered trees each layer copy counts separately, so
    a projection never costs more.
    """

    root: int
    split: tuple
    in_edges: frozenset
    out_edges: frozenset
    settled: tuple
    cost: int
    layered: bool = False
    flags: tuple = ()

    @property
    def density(self):
        if not self.settled:
            return INF
        return Fraction(self.cost, len(self.settled))

    def closure_arcs(self) -> frozenset:
        if not self.layered:
            return self.in_edges | self.out_edges
        return frozenset((u, v) for u, v, _ in self.in_edges | self.out_edges if u != v)

    def summary(self) -> dict:
        return {
            "root": self.root,
            "split": list(self.split),
            "cost": self.cost,
            "settled": list(self.settled),
            "density": str(self.density),
            "flags": list(self.flags),
        }


def closure_tree_cost(closure: WeightedClosure, edges, bought=frozenset()) -> int:
    return sum(1 for e in set(edges) if e in closure.candidate_set and e not in bought)


def layered_tree_cost(layered: LayeredGraph, arcs, bought=frozenset()) -> int:
    return sum(layered.cost(a, bought) for a in set(arcs))


def closure_tree_settled(inst: HopsetInstance, closure: WeightedClosure, root: int, split, in_edges,
                         out_edges, candidates=None) -> tuple:
    """Demands routed ``s -> root -> t`` inside the tree within both hop budgets."""
    i, j = split
    to_root = hop_distance_table(inst.n, reverse_arcs(closure.arcs(sorted(in_edges))), root, i)[i]
    from_root = hop_distance_table(inst.n, closure.arcs(sorted(out_edges)), root, j)[j]
    ks = range(inst.k) if candidates is None else candidates
    return tuple(k for k in ks
                 if to_root[inst.demands[k][0]] + from_root[inst.demands[k][1]] <= inst.dist[k])


def layered_tree_settled(layered: LayeredGraph, root: int, layer: int, in_edges, out_edges,
                         candidates=None) -> tuple:
    """Demands ``(s_0, t_beta)`` joined through ``root`` on ``layer`` inside the arc sets."""
    n, beta = layered.n, layered.beta
    # distance from every in-vertex up to the root, layer by layer downwards
    down = {(root, layer): 0}
    for k in range(layer - 1, -1, -1):
        for u, v, kk in in_edges:
            if kk == k and (v, k + 1) in down:
                d = down[(v, k + 1)] + layered.length((u, v, k))
                if d < down.get((u, k), INF):
                    down[(u, k)] = d
    up = {(root, layer): 0}
    for k in range(layer, beta):
        for u, v, kk in out_edges:
            if kk == k and (u, k) in up:
                d = up[(u, k)] + layered.length((u, v, k))
                if d < up.get((v, k + 1), INF):
                    up[(v, k + 1)] = d
    inst = layered.inst
    ks = range(inst.k) if candidates is None else candidates
    out = []
    for k in ks:
        s, t = inst.demands[k]
        if down.get((s, 0), INF) + up.get((t, beta), INF) <= inst.dist[k]:
            out.append(k)
    return tuple(out)


def _depths(edges, root: int, inward: bool) -> dict:
    """Hop depth of each tree vertex; raises unless ``edges`` form an arborescence."""
    parent = {}
    for u, v in edges:
        child, par = (u, v) if inward else (v, u)
        if child in parent or child == root:
            raise MalformedTree(f"vertex {child} has two parents or the root has one")
        parent[child] = par
    depth = {root: 0}

    def walk(x, seen=()):
        if x in depth:
            return depth[x]
        if x in seen or x not in parent:
            raise MalformedTree(f"vertex {x} does not lead to the root")
        depth[x] = walk(parent[x], seen + (x,)) + 1
        return depth[x]

    for x in parent:
        walk(x)
    return depth


def make_closure_tree(inst, closure, root, split, in_edges, out_edges, bought=frozenset()) -> JunctionTree:
    in_edges, out_edges = frozenset(in_edges), frozenset(out_edges)
    settled = closure_tree_settled(inst, closure, root, split, in_edges, out_edges)
    cost = closure_tree_cost(closure, in_edges | out_edges, bought)
    return JunctionTree(root, tuple(split), in_edges, out_edges, settled, cost)


def lift_tree(tree: JunctionTree, layered: LayeredGraph, bought=frozenset()) -> JunctionTree:
    """Place a closure junction tree into the layered graph.

    An in-arc leaving a vertex at depth ``h`` goes to layer ``i - h``, an
    out-arc leaving a vertex at depth ``h`` to layer ``i + h``; every tree
    vertex is padded to layer 0 (in side) or layer ``beta`` (out side).
    """
    if tree.layered:
        raise MalformedTree("tree is already layered")
    i, j = tree.split
    beta = layered.beta
    if i + j > beta or min(i, j) < 0:
        raise MalformedTree("hop split exceeds the hopbound")
    r = tree.root
    din = _depths(tree.in_edges, r, inward=True)
    dout = _depths(tree.out_edges, r, inward=False)
    if max(din.values()) > i or max(dout.values()) > j:
        raise MalformedTree("arborescence deeper than its hop budget")
    in_arcs = {(u, v, i - din[u]) for u, v in tree.in_edges}
    out_arcs = {(u, v, i + dout[u]) for u, v in tree.out_edges}
    for u, h in din.items():
        in_arcs.update((u, u, k) for k in range(i - h))
    for u, h in dout.items():
        out_arcs.update((u, u, k) for k in range(i + h, beta))
    in_arcs, out_arcs = frozenset(in_arcs), frozenset(out_arcs)
    settled = layered_tree_settled(layered, r, i, in_arcs, out_arcs)
    cost = layered_tree_cost(layered, in_arcs | out_arcs, bought)
    return JunctionTree(r, (i, beta - i), in_arcs, out_arcs, settled, cost, layered=True, flags=tree.flags)


def project_tree(tree: JunctionTree, layered: LayeredGraph, bought=frozenset()) -> JunctionTree:
    """Drop layers and padding arcs.

    The claimed settled set carries over and is re-checked in the closure.
    The cost is recomputed on distinct closure arcs, so it only drops when
    one closure arc was used on several layers.
    """
    if not tree.layered:
        raise MalformedTree("tree is not layered")
    inst, closure = layered.inst, layered.closure
    for arcs in (tree.in_edges, tree.out_edges):
        for u, v, k in arcs:
            if not 0 <= k < layered.beta or (u != v and (u, v) not in closure.length):
                raise MalformedTree(f"arc {(u, v, k)} is not in the layered graph")
    i = tree.split[0]
    if any(k >= i for _, _, k in tree.in_edges) or any(k < i for _, _, k in tree.out_edges):
        raise MalformedTree("in-arcs must lie below the root layer and out-arcs above it")
    in_edges = frozenset((u, v) for u, v, _ in tree.in_edges if u != v)
    out_edges = frozenset((u, v) for u, v, _ in tree.out_edges if u != v)
    split = (i, layered.beta - i)
    ok = set(closure_tree_settled(inst, closure, tree.root, split, in_edges, out_edges, tree.settled))
    if ok != set(tree.settled):
        raise MalformedTree("claimed demands are not routed through the projected tree")
    cost = closure_tree_cost(closure, in_edges | out_edges, bought)
    return JunctionTree(tree.root, split, in_edges, out_edges, tree.settled, cost, flags=tree.flags)


def validate_layered_tree(tree: JunctionTree, layered: LayeredGraph) -> None:
    """Raise :class:`MalformedTree` unless every claimed demand is routed through the root."""
    r, i = tree.root, tree.split[0]
    got = set(layered_tree_settled(layered, r, i, tree.in_edges, tree.out_edges, tree.settled))
    if got != set(tree.settled):
        raise MalformedTree("a claimed demand is not routed through the root")


# --------------------------------------------------------------------------
# frontiers


def _pareto_insert(labels: list) -> list:
    """Keep (cost, length, arcs) labels not dominated in both cost and length."""
    labels.sort(key=lambda x: (x[1], x[0], x[2]))
    out = []
    best = None
    for lab in labels:
        if best is None or lab[0] < best:
            out.append(lab)
            best = lab[0]
    return out


def _frontiers(layered: LayeredGraph, s: int, t: int, bound: int, bought):
    """Per-layer Pareto labels ``(cost, length, arcs)`` of ``s_0 -> v_k`` and ``v_k -> t_beta`` walks."""
    n, beta, closure = layered.n, layered.beta, layered.closure
    dist = closure.dist
    out_arcs = [[] for _ in range(n)]
    for u, v in closure.edges:
        out_arcs[u].append(v)
    capped = False

    def arc_cost(u, v):
        return int((u, v) in closure.candidate_set and (u, v) not in bought)

    fwd = [[[] for _ in range(n)] for _ in range(beta + 1)]
    fwd[0][s] = [(0, 0, ())]
    for k in range(beta):
        nxt = [[] for _ in range(n)]
        for u in range(n):
            for c, l, arcs in fwd[k][u]:
                nxt[u].append((c, l, arcs + ((u, u, k),)))
                for v in out_arcs[u]:
                    nl = l + closure.length[(u, v)]
                    if nl + dist[v][t] <= bound:
                        nxt[v].append((c + arc_cost(u, v), nl, arcs + ((u, v, k),)))
        for v in range(n):
            nxt[v] = _pareto_insert(nxt[v])
            if len(nxt[v]) > FRONTIER_CAP:
                nxt[v] = nxt[v][:FRONTIER_CAP]
                capped = True
        fwd[k + 1] = nxt

    bwd = [[[] for _ in range(n)] for _ in range(beta + 1)]
    bwd[beta][t] = [(0, 0, ())]
    in_arcs = [[] for _ in range(n)]
    for u, v in closure.edges:
        in_arcs[v].append(u)
    for k in range(beta - 1, -1, -1):
        nxt = [[] for _ in range(n)]
        for v in range(n):
            for c, l, arcs in bwd[k + 1][v]:
                nxt[v].append((c, l, ((v, v, k),) + arcs))
                for u in in_arcs[v]:
                    nl = l + closure.length[(u, v)]
                    if dist[s][u] + nl <= bound:
                        nxt[u].append((c + arc_cost(u, v), nl, ((u, v, k),) + arcs))
        for u in range(n):
            nxt[u] = _pareto_insert(nxt[u])
            if len(nxt[u]) > FRONTIER_CAP:
                nxt[u] = nxt[u][:FRONTIER_CAP]
                capped = True
        bwd[k] = nxt
    return fwd, bwd, capped


def _paid(arcs, closure, bought) -> frozenset:
    return frozenset((u, v) for u, v, _ in arcs
                     if u != v and (u, v) in closure.candidate_set and (u, v) not in bought)


def _pairs(fwd_labels, bwd_labels, bound):
    """For each in-label the cheapest compatible out-label."""
    out = []
    if not fwd_labels or not bwd_labels:
        return out
    # bwd labels are sorted by length with strictly falling cost
    for c1, l1, a1 in fwd_labels:
        best = None
        for c2, l2, a2 in bwd_labels:
            if l1 + l2 <= bound:
                best = (c2, l2, a2)
            else:
                break
        if best is not None:
            out.append((a1, best[2]))
    return out


# --------------------------------------------------------------------------
# heuristic finder


def min_density_junction_tree(layered: LayeredGraph, demands, bought=frozenset()) -> JunctionTree:
    """Root enumeration with a marginal-cost greedy per root.

    For each root copy ``r_i`` and each open demand, the cheapest compatible
    pair of Pareto walks ``s_0 -> r_i -> t_beta`` is formed per in-label.
    Demands are then added by smallest marginal cost (new unbought candidate
    arcs), ties to the lower index, and the best-density prefix is kept.  The
    chosen prefix is extended by every further demand the bought arcs, E and
    the chosen arcs already route through the root.  Bought arcs cost 0.
    """
    inst, closure = layered.inst, layered.closure
    demands = sorted(set(demands))
    if not demands:
        raise NoTree("no open demands")
    bought = frozenset(bought)
    fronts = {}
    capped = False
    for k in demands:
        s, t = inst.demands[k]
        f, b, cap = _frontiers(layered, s, t, inst.dist[k], bought)
        fronts[k] = (f, b)
        capped |= cap

    best = None
    for layer in range(layered.beta + 1):
        for r in range(layered.n):
            options = {}
            for k in demands:
                f, b = fronts[k]
                pairs = _pairs(f[layer][r], b[layer][r], inst.dist[k])
                if pairs:
                    options[k] = [(_paid(a1 + a2, closure, bought), a1, a2) for a1, a2 in pairs]
            if not options:
                continue
            cand = _greedy_root(options)
            cost, chosen, union = cand
            key = (Fraction(cost, len(chosen)), -len(chosen), layer, r)
            if best is None or key < best[0]:
                best = (key, r, layer, chosen, union)
    if best is None:
        raise NoTree("no open demand can be routed through any root")
    _, r, layer, chosen, union = best
    in_arcs, out_arcs = set(), set()
    for k, (paid, a1, a2) in chosen.items():
        in_arcs.update(a1)
        out_arcs.update(a2)
    _extend_with_free(layered, r, layer, demands, chosen, union, bought, in_arcs, out_arcs)
    in_arcs, out_arcs = frozenset(in_arcs), frozenset(out_arcs)
    settled = layered_tree_settled(layered, r, layer, in_arcs, out_arcs, demands)
    if not set(chosen) <= set(settled):  # pragma: no cover - chosen pairs are valid by construction
        raise MalformedTree("greedy pair lost during re-verification")
    cost = layered_tree_cost(layered, in_arcs | out_arcs, bought)
    flags = ("frontier-cap",) if capped else ()
    return JunctionTree(r, (layer, layered.beta - layer), in_arcs, out_arcs, settled, cost,
                        layered=True, flags=flags)


def _greedy_root(options: dict):
    union: set = set()
    chosen = {}
    best = None
    order = []
    left = dict(options)
    while left:
        pick = None
        for k in sorted(left):
            for opt in left[k]:
                marginal = len(opt[0] - union)
                if pick is None or marginal < pick[0]:
                    pick = (marginal, k, opt)
        _, k, opt = pick
        union |= opt[0]
        chosen[k] = opt
        order.append(k)
        del left[k]
        density = Fraction(len(union), len(chosen))
        if best is None or density < best[0]:
            best = (density, len(union), dict(chosen), frozenset(union))
    _, cost, chosen, union = best
    return cost, chosen, union


def _extend_with_free(layered, r, layer, demands, chosen, union, bought, in_arcs, out_arcs):
    """Add routes for further demands that need no arc outside E, bought and ``union``."""
    inst, closure = layered.inst, layered.closure
    free = [(u, v, closure.length[(u, v)]) for u, v in closure.edges
            if (u, v) in closure.base or (u, v) in bought or (u, v) in union]
    n, beta = inst.n, inst.beta
    to_root = hop_distance_table(n, reverse_arcs(free), r, layer)
    from_root = hop_distance_table(n, free, r, beta - layer)
    for k in demands:
        if k in chosen:
            continue
        s, t = inst.demands[k]
        if to_root[layer][s] + from_root[beta - layer][t] > inst.dist[k]:
            continue
        into = _walk_back(to_root, free, s, layer, reverse=True)
        out = _walk_back(from_root, free, t, beta - layer, reverse=False)
        # into: s -> r with h arcs, placed to end on the root layer
        h = len(into)
        in_arcs.update((s, s, q) for q in range(layer - h))
        in_arcs.update((u, v, layer - h + q) for q, (u, v) in enumerate(into))
        out_arcs.update((u, v, layer + q) for q, (u, v) in enumerate(out))
        out_arcs.update((t, t, q) for q in range(layer + len(out), beta))


def _walk_back(table, arcs, x, hops, reverse):
    """Arc sequence of a shortest ``<= hops`` route realizing ``table``.

    With ``reverse`` the table was built on reversed arcs from the root, so
    the route runs ``x -> root``; otherwise it runs ``root -> x``.
    """
    path = []
    j = hops
    while True:
        d = table[j][x]
        while j > 0 and table[j - 1][x] == d:
            j -= 1
        if j == 0:
            break
        for u, v, l in arcs:
            a, b = (v, u) if reverse else (u, v)
            # a -> b in the table's own orientation
            if b == x and table[j - 1][a] + l == d:
                path.append((u, v))
                x, j = a, j - 1
                break
        else:  # pragma: no cover
            raise AssertionError("inconsistent hop table")
    if reverse:
        return path
    return path[::-1]


# --------------------------------------------------------------------------
# exact finder (small instances)


def _root_masks(layered: LayeredGraph, demands, bought, r: int, layer: int, path_limit: int):
    """Minimal paid-arc sets of every valid ``s -> r -> t`` route, per demand."""
    inst, closure = layered.inst, layered.closure
    beta = inst.beta
    out = {}
    for k in demands:
        s, t = inst.demands[k]
        bound = inst.dist[k]
        if closure.dist[s][r] + closure.dist[r][t] > bound:
            continue
        ins = [()] if s == r else (
            enumerate_valid_paths(closure, s, r, layer, bound, limit=path_limit) if layer else [])
        outs = [()] if t == r else (
            enumerate_valid_paths(closure, r, t, beta - layer, bound, limit=path_limit) if beta - layer else [])
        if not ins or not outs:
            continue
        length = closure.length
        outs_l = sorted((sum(length[e] for e in p), p) for p in outs)
        sets = {}
        for p in ins:
            lp = sum(length[e] for e in p)
            for lq, q in outs_l:
                if lp + lq > bound:
                    break
                paid = frozenset(e for e in p + q if e in closure.candidate_set and e not in bought)
                sets.setdefault(paid, (p, q))
        minimal = {a: w for a, w in sets.items() if not any(b < a for b in sets)}
        if minimal:
            out[k] = minimal
    return out


def _mask_tree(layered, r, layer, witnesses, bought):
    in_arcs, out_arcs = set(), set()
    beta = layered.beta
    for p, q in witnesses:
        h = len(p)
        s = p[0][0] if p else r
        in_arcs.update((s, s, x) for x in range(layer - h))
        in_arcs.update((u, v, layer - h + x) for x, (u, v) in enumerate(p))
        out_arcs.update((u, v, layer + x) for x, (u, v) in enumerate(q))
        t = q[-1][1] if q else r
        out_arcs.update((t, t, x) for x in range(layer + len(q), beta))
    return frozenset(in_arcs), frozenset(out_arcs)


def _check_caps(relevant, demands, edge_cap, demand_cap):
    if len(demands) > demand_cap:
        raise CapExceeded(f"{len(demands)} demands exceed the cap of {demand_cap}")
    if len(relevant) > edge_cap:
        raise CapExceeded(f"{len(relevant)} relevant candidate arcs exceed the cap of {edge_cap}")


def exact_min_density_small(layered: LayeredGraph, demands, bought=frozenset(), edge_cap: int = 16,
                            demand_cap: int = 10, path_limit: int = 100000) -> JunctionTree:
    """True minimum-density junction tree by subset enumeration.

    For every root copy, every subset ``U`` of the candidate arcs occurring on
    some route is scored by ``|U| / #demands with a route paying only arcs in
    U``; subsets are evaluated as numpy bitmasks.
    """
    demands = sorted(set(demands))
    if not demands:
        raise NoTree("no open demands")
    bought = frozenset(bought)
    best = None
    for layer in range(layered.beta + 1):
        for r in range(layered.n):
            masks = _root_masks(layered, demands, bought, r, layer, path_limit)
            if not masks:
                continue
            relevant = sorted({e for m in masks.values() for a in m for e in a})
            _check_caps(relevant, demands, edge_cap, demand_cap)
            bit = {e: 1 << x for x, e in enumerate(relevant)}
            U = np.arange(1 << len(relevant), dtype=np.int64)
            count = np.zeros(len(U), dtype=np.int64)
            for k, m in masks.items():
                covered = np.zeros(len(U), dtype=bool)
                for a in m:
                    am = sum(bit[e] for e in a)
                    covered |= (U & am) == am
                count += covered
            size = np.zeros(len(U), dtype=np.int64)
            for x in range(len(relevant)):
                size += (U >> x) & 1
            ok = np.nonzero(count)[0]
            ratio = size[ok] / count[ok]
            # equal rationals round to equal doubles, so ties are found exactly
            for u in ok[ratio == ratio.min()]:
                key = (Fraction(int(size[u]), int(count[u])), -int(count[u]), layer, r, int(u))
                if best is None or key < best[0]:
                    best = (key, r, layer, int(u), masks, relevant)
    if best is None:
        raise NoTree("no open demand can be routed through any root")
    _, r, layer, u, masks, relevant = best
    chosen = frozenset(e for x, e in enumerate(relevant) if u >> x & 1)
    return _tree_from_union(layered, r, layer, masks, chosen, bought, "exact-bitmask")


def _tree_from_union(layered, r, layer, masks, chosen, bought, tag):
    witnesses = []
    for k in sorted(masks):
        for a, w in sorted(masks[k].items(), key=lambda x: (len(x[0]), sorted(x[0]))):
            if a <= chosen:
                witnesses.append(w)
                break
    in_arcs, out_arcs = _mask_tree(layered, r, layer, witnesses, bought)
    settled = layered_tree_settled(layered, r, layer, in_arcs, out_arcs, sorted(masks))
    cost = layered_tree_cost(layered, in_arcs | out_arcs, bought)
    return JunctionTree(r, (layer, layered.beta - layer), in_arcs, out_arcs, settled, cost,
                        layered=True, flags=(tag,))


def exact_min_density_dfs(layered: LayeredGraph, demands, bought=frozenset(), edge_cap: int = 16,
                          demand_cap: int = 10, path_limit: int = 100000) -> JunctionTree:
    """Second exact finder: depth-first choice of one route (or none) per demand.

    Every union of minimal routes is scored by its size over the number of
    demands it covers; a minimum-density set can always be taken to be such
    a union.
    """
    demands = sorted(set(demands))
    if not demands:
        raise NoTree("no open demands")
    bought = frozenset(bought)
    best = None
    for layer in range(layered.beta + 1):
        for r in range(layered.n):
            masks = _root_masks(layered, demands, bought, r, layer, path_limit)
            if not masks:
                continue
            relevant = {e for m in masks.values() for a in m for e in a}
            _check_caps(relevant, demands, edge_cap, demand_cap)
            keys = sorted(masks)
            options = [sorted(masks[k], key=lambda a: (len(a), sorted(a))) for k in keys]
            seen = set()

            def covered(U):
                return sum(1 for m in options if any(a <= U for a in m))

            stack = [(0, frozenset(), False)]
            while stack:
                idx, U, took = stack.pop()
                if (idx, U) in seen:
                    continue
                seen.add((idx, U))
                if idx == len(keys):
                    if took:
                        c = covered(U)
                        key = (Fraction(len(U), c), -c, layer, r, tuple(sorted(U)))
                        if best is None or key[:2] < best[0][:2]:
                            best = (key, r, layer, masks, U)
                    continue
                stack.append((idx + 1, U, took))
                for a in options[idx]:
                    stack.append((idx + 1, U | a, True))
    if best is None:
        raise NoTree("no open demand can be routed through any root")
    _, r, layer, masks, U = best
    return _tree_from_union(layered, r, layer, masks, U, bought, "exact-dfs")


# --------------------------------------------------------------------------
# buying loop


def junction_tree_hopset(inst: HopsetInstance, closure: WeightedClosure, exact: bool = False) -> HopsetSolution:
    """Buy the candidate arcs of low-density trees until every demand is settled."""
    layered = build_layered_graph(inst, closure)
    finder = exact_min_density_small if exact else min_density_junction_tree
    open_ = unsettled_by_base(inst)
    bought: set = set()
    trees = []
    limit = len(open_)
    while open_:
        if len(trees) >= limit:  # pragma: no cover - every tree settles a demand
            raise AssertionError("buying loop exceeded one iteration per demand")
        tree = finder(layered, open_, frozenset(bought))
        validate_layered_tree(tree, layered)
        flat = project_tree(tree, layered, frozenset(bought))
        bought |= {e for e in flat.closure_arcs() if e in closure.candidate_set}
        arcs = inst.arcs() + closure.arcs(sorted(bought))
        done = set(settled_demands(inst, arcs, open_))
        if not set(tree.settled) <= done or not done:
            raise MalformedTree("bought tree failed to settle its claimed demands")
        trees.append(flat.summary() | {"layered_cost": tree.cost})
        open_ = [k for k in open_ if k not in done]
    name = "junction-tree-exact" if exact else "junction-tree"
    return make_solution(inst, closure, sorted(bought), name, params={"exact": exact},
                         details={"trees": trees, "iterations": len(trees)})


# --------------------------------------------------------------------------
# random closure trees (test support)


def random_closure_tree(inst: HopsetInstance, closure: WeightedClosure, rng, size: int | None = None) -> JunctionTree:
    """A random junction tree of the closure with a random root and split.

    No arc is used by both arborescences, so lifting keeps the cost.
    """
    n, beta = inst.n, inst.beta
    r = int(rng.integers(0, n))
    i = int(rng.integers(0, beta + 1))
    j = beta - i
    if size is None:
        size = int(rng.integers(1, n + 1))
    in_edges, out_edges = set(), set()
    for edges, budget, inward in ((in_edges, i, True), (out_edges, j, False)):
        depth = {r: 0}
        for v in (int(x) for x in rng.permutation(n)):
            if len(depth) > size or v in depth:
                continue
            hosts = sorted(p for p, h in depth.items() if h < budget
                           and ((v, p) if inward else (p, v)) in closure.length
                           and (inward or (p, v) not in in_edges))
            if not hosts:
                continue
            p = hosts[int(rng.integers(0, len(hosts)))]
            depth[v] = depth[p] + 1
            edges.add((v, p) if inward else (p, v))
    return make_closure_tree(inst, closure, r, (i, j), in_edges, out_edges)


__all__ = [
    "FRONTIER_CAP",
    "JunctionTree",
    "LayeredGraph",
    "build_layered_graph",
    "closure_tree_cost",
    "closure_tree_settled",
    "exact_min_density_dfs",
    "exact_min_density_small",
    "junction_tree_hopset",
    "layered_tree_cost",
    "layered_tree_settled",
    "lift_path",
    "lift_tree",
    "min_density_junction_tree",
    "project_tree",
    "random_closure_tree",
    "validate_layered_tree",
]
