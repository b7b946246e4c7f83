"""Rounding a fractional hopset into an integral one.

Two routes are provided.  The sqrt-OPT route splits demands by the size of
their local neighborhood: thick demands are settled by sampling whole stars of
the closure, thin ones by independent LP rounding with a blown-up rate.  The
hopbound-2 route rounds with one random threshold per vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import WrongHopbound
from .instance import (
    HopsetInstance,
    HopsetSolution,
    WeightedClosure,
    make_solution,
    settled_demands,
    unsettled_by_base,
)
from .lp.cutgen import DEFAULT_EPS, FractionalEdgeSolution, solve_hopset_lp
from .rng import derive_seed, make_rng


def log_n(n: int) -> float:
    # ln 3 keeps the sample counts positive on one- and two-vertex graphs
    return math.log(max(n, 3))


def local_neighborhood(inst: HopsetInstance, closure: WeightedClosure, demand: int) -> frozenset:
    """Vertices on some valid path of demand index ``demand`` inside G_M."""
    s, t = inst.demands[demand]
    beta, bound = inst.beta, inst.dist[demand]
    fwd = closure.hop_table_from(s, beta)
    bwd = closure.hop_table_to(t, beta)
    out = set()
    for v in range(inst.n):
        for i in range(beta + 1):
            if any(fwd[i][v] + bwd[j][v] <= bound for j in range(beta - i + 1)):
                out.add(v)
                break
    return frozenset(out)


def is_thick(inst: HopsetInstance, closure: WeightedClosure, demand: int, b: float) -> bool:
    return len(local_neighborhood(inst, closure, demand)) * b >= inst.n


def _settled_with(inst: HopsetInstance, closure: WeightedClosure, edges, indices) -> set:
    arcs = inst.arcs() + closure.arcs(sorted(e for e in edges if e not in closure.base))
    return set(settled_demands(inst, arcs, indices))


def star_sampling(inst: HopsetInstance, closure: WeightedClosure, b: float, seed: int) -> frozenset:
    """In- and out-stars of ``ceil(b ln n)`` random roots, plus the direct arc
    of every thick demand the stars leave open."""
    if not 1 <= b <= max(1, inst.n):
        raise ValueError("b must lie in [1, n]")
    rng = make_rng(seed, "star-sampling")
    chosen: set = set()
    if inst.n > 1:
        rounds = math.ceil(b * log_n(inst.n))
        for v in rng.integers(0, inst.n, size=rounds):
            chosen.update(closure.in_star(int(v)))
            chosen.update(closure.out_star(int(v)))
    thick = [k for k in range(inst.k) if is_thick(inst, closure, k, b)]
    done = _settled_with(inst, closure, chosen, thick)
    chosen.update(inst.demands[k] for k in thick if k not in done)
    return frozenset(chosen)


def randomized_rounding(inst: HopsetInstance, closure: WeightedClosure, x, b: float, seed: int):
    """Keep each candidate arc with probability ``min(1, 2 (n/b) ln n x_e)``.

    Returns ``(edges, fell_back)``; when some thin demand stays open the whole
    candidate set is returned instead.
    """
    values = x.x if isinstance(x, FractionalEdgeSolution) else x
    rng = make_rng(seed, "randomized-rounding")
    rate = 2 * (inst.n / b) * log_n(inst.n)
    draws = rng.random(len(closure.candidates))
    picked = frozenset(
        e for e, u in zip(closure.candidates, draws)
        if u < min(1.0, rate * float(values.get(e, 0)))
    )
    thin = [k for k in range(inst.k) if not is_thick(inst, closure, k, b)]
    if len(_settled_with(inst, closure, picked, thin)) == len(thin):
        return picked, False
    return frozenset(closure.candidates), True


@dataclass
class RoundingRun:
    guess: int
    b: float
    seed: int
    thick_edges: frozenset = field(repr=False)
    thin_edges: frozenset = field(repr=False)
    fell_back: bool
    cost: int

    def summary(self) -> dict:
        return {"guess": self.guess, "b": self.b, "seed": self.seed, "cost": self.cost,
                "fell_back": self.fell_back}


def opt_guesses(n: int) -> list:
    top = math.ceil(2 * math.log2(max(n, 2)))
    return [2**i for i in range(top + 1)]


def _lp(inst, closure, eps, lp):
    if lp is None:
        lp = solve_hopset_lp(inst, closure, eps)
    return lp


def sqrt_opt_algorithm(inst: HopsetInstance, closure: WeightedClosure, seed: int, eps=DEFAULT_EPS,
                       lp: FractionalEdgeSolution | None = None) -> HopsetSolution:
    """Star sampling plus randomized rounding for every power-of-two OPT guess.

    One LP solution serves every guess: a guess below ``objective/(1+eps)``
    is below the LP optimum and is skipped, every other guess reuses the
    solution as is.  The cheapest verified union wins; ties keep the smaller
    guess.
    """
    eps = Fraction(eps)
    params = {"eps": eps}
    if not unsettled_by_base(inst):
        return make_solution(inst, closure, (), "sqrt-opt", seed, params, {"runs": []})
    lp = _lp(inst, closure, eps, lp)
    floor = lp.objective / (1 + eps)
    runs = []
    best = None
    for g in opt_guesses(inst.n):
        if g < floor:
            continue
        b = min(max(1.0, math.sqrt(g)), float(inst.n))
        sub = derive_seed(seed, "sqrt-opt", g)
        thick = star_sampling(inst, closure, b, sub)
        thin, fell_back = randomized_rounding(inst, closure, lp, b, sub)
        H = sorted(e for e in thick | thin if e in closure.candidate_set)
        sol = make_solution(inst, closure, H, "sqrt-opt", seed, params)
        runs.append(RoundingRun(g, b, sub, thick, thin, fell_back, sol.cost))
        if sol.feasible and (best is None or sol.cost < best.cost):
            best = sol
    best.details = {"runs": [r.summary() for r in runs], "lp_objective": lp.objective}
    return best


def two_hop_rounding(inst: HopsetInstance, closure: WeightedClosure, c: float = 4, seed: int = 0,
                     eps=DEFAULT_EPS, lp: FractionalEdgeSolution | None = None) -> HopsetSolution:
    """Threshold rounding for hopbound 2, then the direct arc of any open demand."""
    if inst.beta != 2:
        raise WrongHopbound(f"threshold rounding needs hopbound 2, got {inst.beta}")
    eps = Fraction(eps)
    params = {"c": c, "eps": eps}
    if not unsettled_by_base(inst):
        return make_solution(inst, closure, (), "two-hop", seed, params, {"fallbacks": 0})
    lp = _lp(inst, closure, eps, lp)
    rng = make_rng(seed, "two-hop")
    T = rng.random(inst.n)
    scale = c * log_n(inst.n)
    H = set()
    for u, v in closure.candidates:
        xe = float(lp.x.get((u, v), 0))
        # arcs with x = 0 would only enter on a threshold of exactly 0
        if xe > 0 and min(T[u], T[v]) <= scale * xe:
            H.add((u, v))
    done = _settled_with(inst, closure, H, range(inst.k))
    missing = [inst.demands[k] for k in range(inst.k) if k not in done]
    H.update(missing)
    details = {"fallbacks": len(missing), "lp_objective": lp.objective}
    return make_solution(inst, closure, sorted(H), "two-hop", seed, params, details)


__all__ = [
    "RoundingRun",
    "is_thick",
    "local_neighborhood",
    "log_n",
    "opt_guesses",
    "randomized_rounding",
    "sqrt_opt_algorithm",
    "star_sampling",
    "two_hop_rounding",
]
