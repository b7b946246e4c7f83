import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enumerated_hop_distance, path_instance, small_instance
from hopset.errors import CapExceeded, MalformedTree, NoTree
from hopset.instance import unsettled_by_base
from hopset.junction import (
    JunctionTree,
    build_layered_graph,
    exact_min_density_dfs,
    exact_min_density_small,
    junction_tree_hopset,
    lift_path,
    lift_tree,
    make_closure_tree,
    min_density_junction_tree,
    project_tree,
    random_closure_tree,
    validate_layered_tree,
)
from hopset.rng import make_rng


def brute_min_density(inst, cl, demands):
    """Minimum over root, split and candidate subset U of |U| / #demands routed via the root in E+U."""
    # an arc off every short enough s -> t walk can never help
    d = cl.dist
    cand = sorted(e for e in cl.candidates if any(
        d[inst.demands[k][0]][e[0]] + cl.length[e] + d[e[1]][inst.demands[k][1]] <= inst.dist[k]
        for k in demands))
    best = None
    for size in range(len(cand) + 1):
        for U in itertools.combinations(cand, size):
            arcs = list(inst.edges) + [(u, v, cl.length[(u, v)]) for u, v in U]
            for r in range(inst.n):
                for i in range(inst.beta + 1):
                    cnt = sum(
                        1 for k in demands
                        if enumerated_hop_distance(inst.n, arcs, inst.demands[k][0], r, i)
                        + enumerated_hop_distance(inst.n, arcs, r, inst.demands[k][1], inst.beta - i)
                        <= inst.dist[k])
                    if cnt:
                        d = Fraction(size, cnt)
                        best = d if best is None else min(best, d)
        if best is not None and best <= Fraction(size + 1, len(demands)):
            break  # larger U cannot beat the best density any more
    return best


def test_layered_counts_on_path():
    inst, cl = path_instance(4, 2, 3)
    L = build_layered_graph(inst, cl)
    assert L.num_vertices == 3 * 4
    assert L.num_arcs == 2 * (len(cl.edges) + 4)
    assert L.demands == ((0, 2 * 4 + 3),)


def test_lift_path_pads_at_target():
    assert lift_path([(0, 2), (2, 3)], 4) == [(0, 2, 0), (2, 3, 1), (3, 3, 2), (3, 3, 3)]
    with pytest.raises(ValueError):
        lift_path([(0, 1)] * 3, 2)


def test_single_arc_tree_round_trip():
    inst, cl = path_instance(4, 2, 3)
    L = build_layered_graph(inst, cl)
    tree = make_closure_tree(inst, cl, 0, (0, 2), [], [(0, 3)])
    assert tree.settled == (0,) and tree.cost == 1
    up = lift_tree(tree, L)
    assert up.cost == 1 and up.settled == (0,)
    down = project_tree(up, L)
    assert down.cost == 1 and down.closure_arcs() == {(0, 3)}


def test_malformed_trees_rejected():
    inst, cl = path_instance(4, 2, 3)
    L = build_layered_graph(inst, cl)
    with pytest.raises(MalformedTree):  # two parents
        lift_tree(make_closure_tree(inst, cl, 0, (0, 2), [], [(0, 2), (1, 2)]), L)
    with pytest.raises(MalformedTree):  # too deep
        lift_tree(make_closure_tree(inst, cl, 0, (0, 1), [], [(0, 1), (1, 2)]), L)
    bogus = JunctionTree(0, (0, 2), frozenset(), frozenset({(0, 1, 0)}), (0,), 0, layered=True)
    with pytest.raises(MalformedTree):
        validate_layered_tree(bogus, L)
    with pytest.raises(MalformedTree):
        project_tree(bogus, L)


@pytest.mark.parametrize("seed", range(20))
def test_lift_project_preserve_cost_and_settled(seed):
    inst, cl = small_instance(seed)
    L = build_layered_graph(inst, cl)
    assert L.num_vertices == (inst.beta + 1) * inst.n
    assert L.num_arcs == inst.beta * (len(cl.edges) + inst.n)
    rng = make_rng(seed, "test-tree")
    for _ in range(5):
        tree = random_closure_tree(inst, cl, rng)
        up = lift_tree(tree, L)
        assert (up.cost, up.settled) == (tree.cost, tree.settled)
        down = project_tree(up, L)
        assert (down.cost, down.settled) == (tree.cost, tree.settled)
        assert down.closure_arcs() == tree.closure_arcs()


def test_no_open_demands():
    inst, cl = path_instance(3, 2, 2)
    L = build_layered_graph(inst, cl)
    with pytest.raises(NoTree):
        min_density_junction_tree(L, [])
    sol = junction_tree_hopset(inst, cl)
    assert sol.cost == 0 and sol.details["iterations"] == 0


def test_exact_cap():
    inst, cl = small_instance(0, n=6)
    L = build_layered_graph(inst, cl)
    with pytest.raises(CapExceeded):
        exact_min_density_small(L, unsettled_by_base(inst), edge_cap=1)


@pytest.mark.parametrize("seed", range(40))
def test_exact_finders_match_subset_oracle(seed):
    inst, cl = small_instance(seed, n=5 + seed % 2, beta=[2, 3][seed % 2])
    open_ = unsettled_by_base(inst)
    if not open_ or len(cl.candidates) > 14:
        pytest.skip("nothing to route or too many candidates for the oracle")
    L = build_layered_graph(inst, cl)
    expect = brute_min_density(inst, cl, open_)
    a = project_tree(exact_min_density_small(L, open_), L)
    b = project_tree(exact_min_density_dfs(L, open_), L)
    assert a.density == b.density == expect
    h = project_tree(min_density_junction_tree(L, open_), L)
    assert h.density >= expect


@settings(max_examples=30)
@given(st.integers(0, 10**5))
def test_heuristic_tree_is_valid_and_settles_something(seed):
    inst, cl = small_instance(seed, n=7)
    open_ = unsettled_by_base(inst)
    if not open_:
        return
    L = build_layered_graph(inst, cl)
    tree = min_density_junction_tree(L, open_)
    validate_layered_tree(tree, L)
    flat = project_tree(tree, L)
    assert flat.settled and flat.cost <= tree.cost
    assert set(tree.settled) <= set(open_)


@pytest.mark.parametrize("exact", [False, True])
@pytest.mark.parametrize("seed", range(10))
def test_buying_loop_feasible_within_demand_count(seed, exact):
    inst, cl = small_instance(seed, n=7)
    sol = junction_tree_hopset(inst, cl, exact=exact)
    assert sol.feasible
    assert sol.details["iterations"] <= len(unsettled_by_base(inst))
    assert set(sol.edges) <= cl.candidate_set


def test_bought_arcs_are_free():
    inst, cl = path_instance(5, 2, 4)
    L = build_layered_graph(inst, cl)
    tree = min_density_junction_tree(L, [0], bought=frozenset(cl.candidates))
    assert tree.cost == 0
