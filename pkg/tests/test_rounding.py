import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enumerated_hop_distance, path_instance, small_instance
from hopset.errors import WrongHopbound
from hopset.instance import brute_force_opt, enumerate_valid_paths, make_instance, weighted_transitive_closure
from hopset.lp.cutgen import solve_hopset_lp
from hopset.rounding import (
    is_thick,
    local_neighborhood,
    log_n,
    opt_guesses,
    randomized_rounding,
    sqrt_opt_algorithm,
    star_sampling,
    two_hop_rounding,
)


def test_log_n_floor():
    assert log_n(1) == log_n(2) == math.log(3)
    assert log_n(10) == math.log(10)


def test_opt_guesses_cover_n_squared():
    assert opt_guesses(4) == [1, 2, 4, 8, 16]


@pytest.mark.parametrize("seed", range(10))
def test_neighborhood_equals_vertices_on_valid_walks(seed):
    inst, cl = small_instance(seed, n=6)
    for k, (s, t) in enumerate(inst.demands):
        # a vertex lies on a short enough walk iff it lies on a short enough simple path here:
        # cycles only add length and hops
        verts = {v for p in enumerate_valid_paths(cl, s, t, inst.beta, inst.dist[k]) for e in p for v in e}
        assert local_neighborhood(inst, cl, k) == frozenset(verts)


def test_thick_threshold():
    inst, cl = path_instance(4, 2, 3)
    size = len(local_neighborhood(inst, cl, 0))
    assert size == 4
    assert is_thick(inst, cl, 0, 1)
    assert not is_thick(inst, cl, 0, Fraction(4, 5))


@pytest.mark.parametrize("seed", range(10))
def test_star_sampling_settles_thick_demands(seed):
    inst, cl = small_instance(seed)
    b = 2
    H = star_sampling(inst, cl, b, seed)
    assert H <= set(cl.edges)
    arcs = list(inst.edges) + [(u, v, cl.length[(u, v)]) for u, v in H if (u, v) not in cl.base]
    for k, (s, t) in enumerate(inst.demands):
        if is_thick(inst, cl, k, b):
            assert enumerated_hop_distance(inst.n, arcs, s, t, inst.beta) <= inst.dist[k]


def test_star_sampling_rejects_bad_b():
    inst, cl = path_instance(4, 2, 3)
    with pytest.raises(ValueError):
        star_sampling(inst, cl, 0.5, 0)


@pytest.mark.parametrize("seed", range(10))
def test_randomized_rounding_is_candidate_subset_and_settles_thin(seed):
    inst, cl = small_instance(seed)
    lp = solve_hopset_lp(inst, cl)
    H, fell_back = randomized_rounding(inst, cl, lp, 1, seed)
    assert H <= cl.candidate_set
    if fell_back:
        assert H == cl.candidate_set
    arcs = list(inst.edges) + [(u, v, cl.length[(u, v)]) for u, v in H]
    for k, (s, t) in enumerate(inst.demands):
        if not is_thick(inst, cl, k, 1):
            assert enumerated_hop_distance(inst.n, arcs, s, t, inst.beta) <= inst.dist[k]


def test_full_x_is_kept_entirely():
    inst, cl = path_instance(5, 2, 4)
    x = {e: Fraction(1) for e in cl.candidates}
    H, fell_back = randomized_rounding(inst, cl, x, 1, 0)
    assert H == cl.candidate_set and not fell_back


@pytest.mark.parametrize("seed", range(15))
def test_sqrt_opt_feasible_and_not_below_opt(seed):
    inst, cl = small_instance(seed, n=7)
    sol = sqrt_opt_algorithm(inst, cl, seed)
    assert sol.feasible
    assert sol.cost >= brute_force_opt(inst, cl, size_cap=30).cost


def test_sqrt_opt_skips_small_guesses():
    inst, cl = small_instance(2, n=8)
    lp = solve_hopset_lp(inst, cl)
    sol = sqrt_opt_algorithm(inst, cl, 0, lp=lp)
    guesses = [r["guess"] for r in sol.details["runs"]]
    assert all(g >= lp.objective / Fraction(11, 10) for g in guesses)


def test_two_hop_requires_hopbound_two():
    inst, cl = path_instance(4, 3, 3)
    with pytest.raises(WrongHopbound):
        two_hop_rounding(inst, cl)


def test_two_hop_on_path_uses_one_arc():
    inst = make_instance(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)], [(0, 3, 3)], 2)
    cl = weighted_transitive_closure(inst)
    sol = two_hop_rounding(inst, cl, seed=1)
    assert sol.feasible and 1 <= sol.cost <= 3


@settings(max_examples=25)
@given(st.integers(0, 10**5))
def test_two_hop_always_feasible(seed):
    inst, cl = small_instance(seed, beta=2)
    sol = two_hop_rounding(inst, cl, seed=seed)
    assert sol.feasible
    assert set(sol.edges) <= cl.candidate_set


def test_rounding_replays():
    inst, cl = small_instance(7, beta=2)
    a = two_hop_rounding(inst, cl, seed=3)
    b = two_hop_rounding(inst, cl, seed=3)
    assert a.edges == b.edges
    assert sqrt_opt_algorithm(inst, cl, 5).edges == sqrt_opt_algorithm(inst, cl, 5).edges
