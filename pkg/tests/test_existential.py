import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import floyd_warshall, path_instance, small_instance
from hopset.errors import ForeignEdge, WrongHopbound
from hopset.existential import (
    applicable_algorithms,
    direct_hopset,
    folklore_exact_hopset,
    parse_mask,
    register_external_construction,
    registered_constructions,
    sample_size,
    tradeoff_driver,
    unregister_external_construction,
)
from hopset.instance import hop_bounded_distance, make_instance, weighted_transitive_closure
from hopset.io import random_instance


def all_pairs_exact(n, beta, seed, density=0.15):
    g = random_instance(n, beta, seed, density=density, demands=0, backbone=True)
    d = floyd_warshall(n, g.edges)
    pairs = [(s, t, None) for s in range(n) for t in range(n) if s != t and d[s][t] < math.inf]
    inst = make_instance(n, g.edges, pairs, beta)
    return inst, weighted_transitive_closure(inst)


def test_sample_size_formula():
    assert sample_size(400, 20) == math.ceil(3 * 20 * math.log(400))
    assert sample_size(40, 4) == 40
    assert sample_size(5, 4) == 5


def test_folklore_needs_hopbound_two():
    inst, cl = path_instance(4, 1, 3)
    with pytest.raises(WrongHopbound):
        folklore_exact_hopset(inst, cl)


@pytest.mark.parametrize("seed", range(8))
def test_folklore_exact_on_all_pairs(seed):
    n, beta = 20 + seed, [4, 6, 8][seed % 3]
    inst, cl = all_pairs_exact(n, beta, seed)
    sol = folklore_exact_hopset(inst, cl, seed=seed)
    arcs = list(inst.edges) + [(u, v, cl.length[(u, v)]) for u, v in sol.edges]
    for s, t in inst.demands:
        assert hop_bounded_distance(arcs, s, t, beta, n) == cl.dist[s][t]
    S = len(sol.details["sample"])
    assert len(sol.edges) <= S * S + sol.details["fallbacks"]


def test_direct_hopset_is_feasible():
    inst, cl = small_instance(5)
    sol = direct_hopset(inst, cl)
    assert sol.feasible


def test_applicable_algorithms_by_hopbound():
    assert applicable_algorithms(path_instance(4, 2)[0]) == ("junction-tree", "sqrt-opt", "folklore", "two-hop")
    assert applicable_algorithms(path_instance(4, 1)[0]) == ("junction-tree", "sqrt-opt")


def test_parse_mask():
    assert parse_mask(None) is None
    assert parse_mask("folklore, two-hop") == ("folklore", "two-hop")
    with pytest.raises(ValueError):
        parse_mask("nope")


@settings(max_examples=30)
@given(st.integers(0, 10**5))
def test_portfolio_picks_cheapest_feasible(seed):
    inst, cl = small_instance(seed)
    res = tradeoff_driver(inst, cl, seed)
    feasible = [e for e in res.entries if e.feasible]
    assert res.chosen.feasible
    assert res.cost == min(e.cost for e in feasible)
    assert res.entry("direct").feasible


def test_external_construction_registry():
    inst, cl = path_instance(4, 2, 3)
    register_external_construction("one-arc", lambda i, c, s: [(0, 3)])
    register_external_construction("bad", lambda i, c, s: [(0, 1)])
    try:
        assert [e.name for e in registered_constructions()] == ["bad", "one-arc"]
        res = tradeoff_driver(inst, cl, 0)
        assert res.entry("one-arc").feasible and res.entry("one-arc").cost == 1
        assert not res.entry("bad").feasible and "ForeignEdge" in res.entry("bad").error
        with pytest.raises(ValueError):
            register_external_construction("folklore", lambda i, c, s: [])
    finally:
        unregister_external_construction("one-arc")
        unregister_external_construction("bad")
    assert registered_constructions() == ()


def test_mask_restricts_portfolio():
    inst, cl = small_instance(1, beta=2)
    res = tradeoff_driver(inst, cl, 0, algo_mask=("two-hop",))
    assert [e.name for e in res.entries] == ["two-hop", "direct"]
    with pytest.raises(ValueError):
        tradeoff_driver(inst, cl, 0, algo_mask=("bogus",))
