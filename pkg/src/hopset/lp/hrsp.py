"""Hopbounded Restricted Shortest Path: cheapest path under a length budget
and a hop budget.

``hrsp_solve`` is the separation oracle used by the cut LP.  It binary-searches
bounds ``L <= z* <= U = n L`` on the optimum, returns a zero-cost path directly
when one exists, and otherwise runs the scaled pseudo-cost dynamic program of
``hrsp_fptas``, whose result costs at most ``z* + L eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NoFeasiblePath
from ..instance import INF, hop_distance_table

_BIG = np.int64(2**62)


@dataclass(frozen=True)
class HrspQuery:
    """Arcs are ``(u, v, length, cost)``; vertex ids lie in ``range(n)``."""

    n: int
    arcs: tuple
    s: int
    t: int
    T: int
    beta: int
    eps: Fraction = Fraction(1, 10)

    def __post_init__(self):
        if self.T < 0 or self.beta < 1:
            raise ValueError("length budget must be >= 0 and hop budget >= 1")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")


def path_cost(q: HrspQuery, path) -> Fraction:
    cost = {(u, v): c for u, v, _, c in q.arcs}
    return sum((cost[e] for e in path), Fraction(0))


def path_length(q: HrspQuery, path) -> int:
    length = {(u, v): l for u, v, l, _ in q.arcs}
    return sum(length[e] for e in path)


def _restricted_path(q: HrspQuery, arcs):
    """Shortest ``<= beta``-hop path within ``arcs`` if its length fits ``T``."""
    table = hop_distance_table(q.n, [(u, v, l) for u, v, l, _ in arcs], q.s, q.beta)
    if table[q.beta][q.t] > q.T:
        return None
    # walk the table backwards
    path = []
    v, j = q.t, q.beta
    while v != q.s:
        d = table[j][v]
        while j > 0 and table[j - 1][v] == d:
            j -= 1
        for u, w, l, _ in arcs:
            if w == v and table[j - 1][u] + l == d:
                path.append((u, v))
                v, j = u, j - 1
                break
        else:  # pragma: no cover - table is consistent by construction
            raise AssertionError("broken hop table")
    path.reverse()
    return _remove_cycles(path)


def _feasible(q: HrspQuery, threshold) -> bool:
    arcs = [(u, v, l) for u, v, l, c in q.arcs if c <= threshold]
    return hop_distance_table(q.n, arcs, q.s, q.beta)[q.beta][q.t] <= q.T


def hrsp_bounds(q: HrspQuery):
    """``(L, U)`` with ``L`` the smallest arc cost whose cost-filtered subgraph
    holds a valid path, and ``U = n L``."""
    levels = sorted({c for _, _, _, c in q.arcs})
    if not levels or not _feasible(q, levels[-1]):
        raise NoFeasiblePath(f"no valid {q.s}->{q.t} path within {q.beta} hops and length {q.T}")
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(q, levels[mid]):
            hi = mid
        else:
            lo = mid + 1
    L = levels[lo]
    return L, q.n * L


def hrsp_fptas(q: HrspQuery, L, U):
    """Pseudo-cost dynamic program over (vertex, pseudo-cost, hops).

    ``D[i, v, j]`` is the minimum length of an ``s -> v`` walk with pseudo-cost
    at most ``i`` and at most ``j`` arcs.  Returns the first walk (as a
    cycle-free arc list) whose length fits the budget, or ``None`` on FAIL.
    Requires ``0 < L <= z* <= U``.
    """
    L, U, eps = Fraction(L), Fraction(U), Fraction(q.eps)
    if L <= 0:
        raise ValueError("the scaled program needs a positive lower bound")
    n, beta = q.n, q.beta
    S = L * eps / (n + 1)
    U_tilde = math.floor(U / S) + n + 1

    usable = [(u, v, l, math.floor(Fraction(c) / S) + 1) for u, v, l, c in q.arcs]
    usable = [a for a in usable if a[3] <= U_tilde]
    us = np.array([a[0] for a in usable], dtype=np.int64)
    vs = np.array([a[1] for a in usable], dtype=np.int64)
    ls = np.array([a[2] for a in usable], dtype=np.int64)
    zs = np.array([a[3] for a in usable], dtype=np.int64)
    order = np.argsort(zs, kind="stable")
    us, vs, ls, zs = us[order], vs[order], ls[order], zs[order]

    if q.s == q.t:
        return []
    # rows are allocated on demand; the scan usually stops far below U_tilde
    D = np.full((min(U_tilde + 1, 256), n, beta + 1), _BIG, dtype=np.int64)
    D[0, q.s, :] = 0
    for i in range(1, U_tilde + 1):
        if i >= len(D):
            grown = np.full((min(U_tilde + 1, 2 * len(D)), n, beta + 1), _BIG, dtype=np.int64)
            grown[: len(D)] = D
            D = grown
        k = int(np.searchsorted(zs, i, side="right"))
        cand = np.full((n, beta + 1), _BIG, dtype=np.int64)
        if k:
            vals = ls[:k, None] + D[i - zs[:k], us[:k], :beta]
            np.minimum.at(cand[:, 1:], vs[:k], np.minimum(vals, _BIG))
        cur = np.minimum(D[i - 1], cand)
        cur[q.s, :] = 0
        np.minimum.accumulate(cur, axis=1, out=cur)
        D[i] = cur
        if cur[q.t, beta] <= q.T:
            return _backtrack(D, usable, q, i)
    return None


def _backtrack(D, usable, q: HrspQuery, i: int):
    v, j = q.t, q.beta
    path = []
    while True:
        d = D[i, v, j]
        if v == q.s and d == 0:
            break
        if j > 0 and D[i, v, j - 1] == d:
            j -= 1
            continue
        if i > 0 and D[i - 1, v, j] == d:
            i -= 1
            continue
        for u, w, l, z in usable:
            if w == v and z <= i and j > 0 and l + D[i - z, u, j - 1] == d:
                path.append((u, v))
                v, i, j = u, i - z, j - 1
                break
        else:  # pragma: no cover - table is consistent by construction
            raise AssertionError("broken pseudo-cost table")
    path.reverse()
    return _remove_cycles(path)


def _remove_cycles(path):
    """Shortcut repeated vertices; no budget or cost can grow."""
    if not path:
        return []
    verts = [path[0][0]]
    for _, v in path:
        if v in verts:
            del verts[verts.index(v) + 1:]
        else:
            verts.append(v)
    return list(zip(verts, verts[1:]))


def hrsp_solve(q: HrspQuery):
    """Bounds, zero-cost shortcut, then the scaled program."""
    L, U = hrsp_bounds(q)
    if L == 0:
        zero = [a for a in q.arcs if a[3] == 0]
        return _restricted_path(q, zero)
    path = hrsp_fptas(q, L, U)
    if path is None:  # pragma: no cover - U >= z* guarantees success
        raise NoFeasiblePath("scaled program failed despite valid bounds")
    return path


def hrsp_exact(q: HrspQuery):
    """Exact cheapest valid path via per-(vertex, hop) Pareto frontiers.

    Labels are ``(length, cost, arcs)``; a label is dropped when another at the
    same vertex has no larger length and no larger cost.
    """
    if q.s == q.t:
        return []
    out = [[] for _ in range(q.n)]
    for u, v, l, c in q.arcs:
        out[u].append((v, l, Fraction(c)))
    # layer[v]: frontier of walks with exactly h arcs ending at v
    layer = [[] for _ in range(q.n)]
    layer[q.s] = [(0, Fraction(0), ())]
    best = None
    for _ in range(q.beta):
        new = [[] for _ in range(q.n)]
        for u in range(q.n):
            for length, cost, path in layer[u]:
                for v, l, c in out[u]:
                    nl = length + l
                    if nl <= q.T:
                        new[v].append((nl, cost + c, path + ((u, v),)))
        layer = [_pareto(f) for f in new]
        for length, cost, path in layer[q.t]:
            if best is None or cost < best[0]:
                best = (cost, path)
    if best is None:
        raise NoFeasiblePath(f"no valid {q.s}->{q.t} path within {q.beta} hops and length {q.T}")
    return _remove_cycles(list(best[1]))


def _pareto(labels):
    labels = sorted(labels, key=lambda x: (x[0], x[1], len(x[2]), x[2]))
    kept = []
    best_cost = None
    for lab in labels:
        if best_cost is None or lab[1] < best_cost:
            kept.append(lab)
            best_cost = lab[1]
    return kept


__all__ = [
    "HrspQuery",
    "INF",
    "hrsp_bounds",
    "hrsp_exact",
    "hrsp_fptas",
    "hrsp_solve",
    "path_cost",
    "path_length",
]
