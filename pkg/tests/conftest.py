import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from hopset.instance import make_instance, weighted_transitive_closure  # noqa: E402
from hopset.io import random_instance  # noqa: E402

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


# ---------------------------------------------------------------- oracles


def floyd_warshall(n, arcs):
    d = [[math.inf] * n for _ in range(n)]
    for v in range(n):
        d[v][v] = 0
    for u, v, l in arcs:
        d[u][v] = min(d[u][v], l)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def simple_paths(n, arcs, s, t, max_hops):
    """Every simple s->t path with at most ``max_hops`` arcs, as (arcs, length)."""
    out = {}
    for u, v, l in arcs:
        out.setdefault(u, []).append((v, l))
    found = []

    def rec(u, path, length, seen):
        if u == t and path:
            found.append((tuple(path), length))
            return
        if len(path) == max_hops:
            return
        for v, l in out.get(u, []):
            if v not in seen:
                path.append((u, v))
                rec(v, path, length + l, seen | {v})
                path.pop()

    rec(s, [], 0, {s})
    return found


def enumerated_hop_distance(n, arcs, s, t, beta):
    if s == t:
        return 0
    best = math.inf
    for _, length in simple_paths(n, arcs, s, t, beta):
        best = min(best, length)
    return best


# ---------------------------------------------------------------- instances


def small_instance(seed, n=None, beta=None, **kw):
    n = n if n is not None else 4 + seed % 6
    beta = beta if beta is not None else [2, 3, 4, 6][seed % 4]
    kw.setdefault("density", 0.2)
    kw.setdefault("demands", 4)
    kw.setdefault("backbone", True)
    kw.setdefault("hard", True)
    inst = random_instance(n, beta, seed, **kw)
    return inst, weighted_transitive_closure(inst)


def path_instance(k=4, beta=2, bound=None):
    """Unit path 0->1->...->k-1 with the single demand (0, k-1)."""
    edges = [(i, i + 1, 1) for i in range(k - 1)]
    inst = make_instance(k, edges, [(0, k - 1, bound)], beta)
    return inst, weighted_transitive_closure(inst)


@st.composite
def graphs(draw, max_n=7, max_len=6):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=2 * n, unique=True))
    edges = [(u, v, draw(st.integers(0, max_len))) for u, v in chosen]
    return n, edges


@pytest.fixture
def seeds():
    return range(20)


def hop_limited_bellman_ford(n, arcs, s, beta):
    """Plain Bellman-Ford truncated after ``beta`` rounds; distances from ``s``."""
    d = [math.inf] * n
    d[s] = 0
    for _ in range(beta):
        nd = list(d)
        for u, v, l in arcs:
            if d[u] + l < nd[v]:
                nd[v] = d[u] + l
        d = nd
    return d


def independently_feasible(inst, closure, H):
    """Every demand settled in E + H, checked without the package's verifier."""
    arcs = list(inst.edges) + [(u, v, closure.length[(u, v)]) for u, v in H]
    rows = {}
    for (s, t), bound in zip(inst.demands, inst.dist):
        if s not in rows:
            rows[s] = hop_limited_bellman_ford(inst.n, arcs, s, inst.beta)
        if rows[s][t] > bound:
            return False
    return True


def milp_opt(inst, closure):
    """Minimum hopset size from a 0/1 program solved by HiGHS over explicitly enumerated paths."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    arcs = [(u, v, closure.length[(u, v)]) for u, v in closure.edges]
    cand = sorted(closure.candidates)
    col = {e: i for i, e in enumerate(cand)}
    groups = []
    for (s, t), bound in zip(inst.demands, inst.dist):
        opts = {frozenset(e for e in p if e in col)
                for p, length in simple_paths(inst.n, arcs, s, t, inst.beta) if length <= bound}
        if frozenset() in opts:
            continue
        groups.append(sorted(opts, key=sorted))
    nf = sum(len(g) for g in groups)
    nvar = len(cand) + nf
    rows, lo, hi = [], [], []
    j = len(cand)
    for g in groups:
        pick = np.zeros(nvar)
        for paid in g:
            pick[j] = 1
            for e in paid:  # f <= y_e
                r = np.zeros(nvar)
                r[j], r[col[e]] = 1, -1
                rows.append(r)
                lo.append(-np.inf)
                hi.append(0)
            j += 1
        rows.append(pick)
        lo.append(1)
        hi.append(np.inf)
    if not groups:
        return 0
    c = np.r_[np.ones(len(cand)), np.zeros(nf)]
    res = milp(c, constraints=LinearConstraint(np.array(rows), lo, hi), integrality=np.ones(nvar),
               bounds=Bounds(0, 1))
    return round(res.fun)
