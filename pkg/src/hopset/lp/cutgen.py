"""Fractional hopsets by nested constraint generation.

The covering program is

    min  sum_{e in E~} x_e   s.t.  sum_e z_e x_e >= 1  for every demand and
                                   every fractional cut z of that demand,
         0 <= x <= 1,  x = 1 on E.

The outer loop keeps a pool of cuts and re-solves this program over the pool.
For a tentative ``x`` the inner loop (:func:`solve_oracle1`) looks for the cut
minimizing ``z.x``; it keeps a pool of valid paths, re-solves the restricted
cut program over them and asks :func:`hrsp_solve` for a valid path that is
too cheap under the current ``z``.

Both restricted programs are covering LPs whose duals are packing LPs with a
nonnegative right-hand side, so each is handled by the exact simplex in
:mod:`hopset.lp.simplex` and read off its dual prices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..errors import IterationLimit, NumericalFailure
from ..instance import (
    HopsetInstance,
    WeightedClosure,
    demand_edges,
    enumerate_valid_paths,
    unsettled_by_base,
)
from .hrsp import HrspQuery, hrsp_solve
from .simplex import solve_packing

DEFAULT_EPS = Fraction(1, 10)
ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class FractionalCut:
    """Nonnegative edge weights under which every valid path of ``demand`` weighs >= 1."""

    demand: tuple
    z: dict

    def value(self, x: dict) -> Fraction:
        return sum((w * x.get(e, ZERO) for e, w in self.z.items()), ZERO)


@dataclass
class FractionalEdgeSolution:
    """``x`` over all closure arcs (1 on E); ``objective`` sums the candidate arcs."""

    x: dict
    objective: Fraction
    cuts: list = field(default_factory=list, repr=False)
    stats: dict = field(default_factory=dict)

    def support(self) -> list:
        return sorted(e for e, v in self.x.items() if v > 0)


def _as_fraction(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    return eps


# --------------------------------------------------------------------------
# master program


def master_lp_solve(pool: Iterable, variables: Iterable) -> dict:
    """Optimal ``x`` of ``min sum x  s.t.  a.x >= r  (a, r) in pool,  0 <= x <= 1``.

    ``pool`` holds ``(coeffs, rhs)`` pairs with ``coeffs`` a dict keyed by
    variable.  Solved through the packing dual

        max r.y - sum w  s.t.  sum_k a_k[e] y_k - w_e <= 1,  y, w >= 0,

    whose row prices are ``x``.  Rows with ``rhs <= 0`` are dropped.
    """
    variables = list(variables)
    rows = [(a, Fraction(r)) for a, r in pool if r > 0]
    if not variables or not rows:
        return {e: ZERO for e in variables}
    index = {e: i for i, e in enumerate(variables)}
    for a, r in rows:
        if sum((Fraction(a.get(e, 0)) for e in variables), ZERO) < r:
            raise NumericalFailure("constraint pool infeasible even at x = 1")
    nk = len(rows)
    nv = len(variables)
    c = [r for _, r in rows] + [-ONE] * nv
    A = [[ZERO] * (nk + nv) for _ in range(nv)]
    for k, (a, _) in enumerate(rows):
        for e, w in a.items():
            if w and e in index:
                A[index[e]][k] = Fraction(w)
    for i in range(nv):
        A[i][nk + i] = -ONE
    res = solve_packing(c, A, [ONE] * nv)
    return {e: res.dual[index[e]] for e in variables}


# --------------------------------------------------------------------------
# inner oracle


@dataclass
class _DemandState:
    k: int
    s: int
    t: int
    bound: int
    local: list
    paths: list = field(default_factory=list)
    inner_iterations: int = 0


def _restricted_cut(paths: list, x: dict):
    """Optimal ``z`` of ``min z.x  s.t.  z(P) >= 1  for P in paths``."""
    edges = sorted({e for p in paths for e in p})
    if not paths:
        return {}, ZERO
    index = {e: i for i, e in enumerate(edges)}
    A = [[ZERO] * len(paths) for _ in edges]
    for j, p in enumerate(paths):
        for e in p:
            A[index[e]][j] = ONE
    res = solve_packing([ONE] * len(paths), A, [x[e] for e in edges])
    z = {e: res.dual[index[e]] for e in edges if res.dual[index[e]]}
    return z, res.value


def _oracle(state: _DemandState, closure: WeightedClosure, beta: int, x: dict, eps: Fraction, cap: int):
    while True:
        z, _ = _restricted_cut(state.paths, x)
        arcs = tuple((u, v, closure.length[(u, v)], z.get((u, v), ZERO)) for u, v in state.local)
        q = HrspQuery(closure.n, arcs, state.s, state.t, state.bound, beta, eps)
        path = tuple(hrsp_solve(q))
        if sum((z.get(e, ZERO) for e in path), ZERO) >= 1:
            break
        state.paths.append(path)
        state.inner_iterations += 1
        if state.inner_iterations > cap:
            raise IterationLimit(f"cut oracle for demand {(state.s, state.t)} exceeded {cap} iterations")
    # the approximate separator proves every valid path weighs >= 1/(1+eps)
    z = {e: min(ONE, (1 + eps) * w) for e, w in z.items()}
    cut = FractionalCut((state.s, state.t), z)
    return cut, cut.value(x)


def _local_state(inst: HopsetInstance, closure: WeightedClosure, k: int) -> _DemandState:
    s, t = inst.demands[k]
    return _DemandState(k, s, t, inst.dist[k], demand_edges(inst, closure, k))


def _full_x(closure: WeightedClosure, values: dict) -> dict:
    x = {e: ONE for e in closure.base}
    for e in closure.candidates:
        x[e] = values.get(e, ZERO)
    return x


def solve_oracle1(inst: HopsetInstance, closure: WeightedClosure, x, demand: int, eps=DEFAULT_EPS,
                  cap: int | None = None):
    """Near-minimum fractional cut of demand index ``demand`` against ``x``.

    ``x`` is a :class:`FractionalEdgeSolution` or a dict over candidate arcs
    (arcs of E are fixed to 1).  Returns ``(cut, value)`` with
    ``value <= (1+eps) * min_z z.x``.
    """
    eps = _as_fraction(eps)
    values = x.x if isinstance(x, FractionalEdgeSolution) else dict(x)
    full = _full_x(closure, values)
    if cap is None:
        cap = 50 * max(1, len(closure.candidates))
    state = _local_state(inst, closure, demand)
    return _oracle(state, closure, inst.beta, full, eps, cap)


# --------------------------------------------------------------------------
# outer loop


def solve_hopset_lp(inst: HopsetInstance, closure: WeightedClosure, eps=DEFAULT_EPS,
                    outer_cap: int | None = None, inner_cap: int | None = None) -> FractionalEdgeSolution:
    """Fractional hopset whose objective lies in ``[LP*, (1+eps) LP*]``.

    Only demands not already settled inside E take part; the rest are covered
    by ``x = 1`` on E.  Variables are the candidate arcs lying on some
    settling walk of a participating demand; all others stay at 0.
    """
    eps = _as_fraction(eps)
    active = [_local_state(inst, closure, k) for k in unsettled_by_base(inst)]
    cand = closure.candidate_set
    variables = sorted({e for st in active for e in st.local if e in cand})
    n_cand = max(1, len(closure.candidates))
    if outer_cap is None:
        outer_cap = 50 * max(1, inst.k) * n_cand
    if inner_cap is None:
        inner_cap = 50 * n_cand

    cuts: list = []
    pool: list = []
    values = {e: ZERO for e in variables}
    rounds = 0
    while active:
        x = _full_x(closure, values)
        added = 0
        for st in active:
            cut, value = _oracle(st, closure, inst.beta, x, eps, inner_cap)
            if value < 1:
                cuts.append(cut)
                rhs = ONE - sum((w for e, w in cut.z.items() if e in closure.base), ZERO)
                pool.append(({e: w for e, w in cut.z.items() if e in cand}, rhs))
                added += 1
        if not added:
            break
        rounds += 1
        if rounds > outer_cap:
            raise IterationLimit(f"outer loop exceeded {outer_cap} rounds")
        values = master_lp_solve(pool, variables)

    scaled = {e: min(ONE, (1 + eps) * v) for e, v in values.items()}
    x = _full_x(closure, scaled)
    objective = sum((x[e] for e in closure.candidates), ZERO)
    stats = {
        "rounds": rounds,
        "cuts": len(cuts),
        "paths": sum(len(st.paths) for st in active),
        "inner_iterations": sum(st.inner_iterations for st in active),
        "variables": len(variables),
        "active_demands": len(active),
        "eps": eps,
        "master_objective": sum(values.values(), ZERO),
    }
    return FractionalEdgeSolution(x=x, objective=objective, cuts=cuts, stats=stats)


def write_cuts(cuts: Iterable[FractionalCut], fh) -> None:
    """One line per nonzero cut weight: ``<s> <t> <u> <v> <num>/<den>``."""
    for cut in cuts:
        s, t = cut.demand
        for (u, v), w in sorted(cut.z.items()):
            if w:
                fh.write(f"{s} {t} {u} {v} {w.numerator}/{w.denominator}\n")


# --------------------------------------------------------------------------
# exact path-formulation oracle


@dataclass
class PathLpCertificate:
    value: Fraction
    x: dict
    flows: dict
    alpha: dict
    z: dict
    gamma: dict


def exact_path_lp(inst: HopsetInstance, closure: WeightedClosure, path_limit: int = 100000) -> PathLpCertificate:
    """Exact LP optimum from the explicit flow formulation over all valid paths.

    Primal: min sum x_e over candidates, each demand ships one unit along its
    valid paths, flow through a candidate arc is at most x_e <= 1, through a
    base arc at most 1.  Solved via its packing dual

        max sum_k a_k - sum_{k, e in E} z_ke - sum_e g_e
        s.t. sum_k z_ke - g_e <= 1   (e candidate)
             a_k - z_k(P) <= 0       (P valid path of k)

    and certified by checking both solutions and equal objectives.
    """
    ks = unsettled_by_base(inst)
    cand = closure.candidate_set
    paths = {}
    for k in ks:
        s, t = inst.demands[k]
        paths[k] = enumerate_valid_paths(closure, s, t, inst.beta, inst.dist[k], limit=path_limit)
    var_edges = sorted({e for k in ks for p in paths[k] for e in p})
    cand_edges = [e for e in var_edges if e in cand]

    cols = [("a", k) for k in ks]
    cols += [("z", k, e) for k in ks for e in sorted({e for p in paths[k] for e in p})]
    cols += [("g", e) for e in cand_edges]
    cidx = {c: i for i, c in enumerate(cols)}
    c = []
    for col in cols:
        if col[0] == "a":
            c.append(ONE)
        elif col[0] == "z":
            c.append(-ONE if col[2] in closure.base else ZERO)
        else:
            c.append(-ONE)
    A, b, row_keys = [], [], []
    for e in cand_edges:
        row = [ZERO] * len(cols)
        for k in ks:
            j = cidx.get(("z", k, e))
            if j is not None:
                row[j] = ONE
        row[cidx[("g", e)]] = -ONE
        A.append(row)
        b.append(ONE)
        row_keys.append(("x", e))
    for k in ks:
        for p in paths[k]:
            row = [ZERO] * len(cols)
            row[cidx[("a", k)]] = ONE
            for e in p:
                row[cidx[("z", k, e)]] = -ONE
            A.append(row)
            b.append(ZERO)
            row_keys.append(("f", k, p))
    if not cols:
        return PathLpCertificate(ZERO, {}, {}, {}, {}, {})
    res = solve_packing(c, A, b) if A else None
    if res is None:
        return PathLpCertificate(ZERO, {}, {}, {}, {}, {})
    prices = dict(zip(row_keys, res.dual))
    x = {e: prices[("x", e)] for e in cand_edges}
    flows = {(key[1], key[2]): v for key, v in prices.items() if key[0] == "f"}
    y = dict(zip(cols, res.primal))
    cert = PathLpCertificate(
        value=res.value,
        x=x,
        flows=flows,
        alpha={k: y[("a", k)] for k in ks},
        z={(col[1], col[2]): v for col, v in y.items() if col[0] == "z"},
        gamma={col[1]: v for col, v in y.items() if col[0] == "g"},
    )
    _certify(inst, closure, ks, paths, cand_edges, cert)
    return cert


def _certify(inst, closure, ks, paths, cand_edges, cert: PathLpCertificate) -> None:
    """Independent feasibility and zero-gap check of both solutions."""
    cand = closure.candidate_set
    for e, v in cert.x.items():
        if not 0 <= v <= 1:
            raise NumericalFailure("path LP certificate: x out of bounds")
    for k in ks:
        if sum((cert.flows[(k, p)] for p in paths[k]), ZERO) < 1:
            raise NumericalFailure("path LP certificate: demand ships less than one unit")
        load: dict = {}
        for p in paths[k]:
            f = cert.flows[(k, p)]
            if f < 0:
                raise NumericalFailure("path LP certificate: negative flow")
            for e in p:
                load[e] = load.get(e, ZERO) + f
        for e, l in load.items():
            cap = cert.x[e] if e in cand else ONE
            if l > cap:
                raise NumericalFailure("path LP certificate: capacity violated")
    primal = sum(cert.x.values(), ZERO)
    for e in cand_edges:
        if sum((v for (k, f), v in cert.z.items() if f == e), ZERO) - cert.gamma[e] > 1:
            raise NumericalFailure("path LP certificate: dual row violated")
    for k in ks:
        for p in paths[k]:
            if cert.alpha[k] > sum((cert.z[(k, e)] for e in p), ZERO):
                raise NumericalFailure("path LP certificate: dual path row violated")
    dual = (sum(cert.alpha.values(), ZERO)
            - sum((v for (k, e), v in cert.z.items() if e in closure.base), ZERO)
            - sum(cert.gamma.values(), ZERO))
    if primal != dual or primal != cert.value:
        raise NumericalFailure("path LP certificate: duality gap")


__all__ = [
    "DEFAULT_EPS",
    "FractionalCut",
    "FractionalEdgeSolution",
    "PathLpCertificate",
    "exact_path_lp",
    "master_lp_solve",
    "solve_hopset_lp",
    "solve_oracle1",
    "write_cuts",
]
