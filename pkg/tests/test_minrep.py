import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import simple_paths
from hopset.errors import BadHopbound, InvalidCover, MalformedInput, NotCanonical
from hopset.instance import make_instance, shared_split_opt, verify_hopset, weighted_transitive_closure
from hopset.minrep import (
    MinRepInstance,
    RepCover,
    all_path_lengths_equal,
    branch_bound_minrep,
    brute_force_minrep,
    canonicalize_shortcut,
    cover_to_shortcut,
    format_minrep,
    is_rep_cover,
    parse_minrep,
    random_minrep,
    reduce_minrep_to_shortcut,
    shortcut_to_cover,
)

# two groups of size 2 per side: A = {0,1},{2,3}; B = {4,5},{6,7}
TOY = MinRepInstance(((0, 1), (2, 3)), ((4, 5), (6, 7)), frozenset({(0, 4), (1, 6), (2, 6), (3, 5)}))


def test_toy_superedges_and_cover():
    assert set(TOY.superedges) == {(0, 0), (0, 1), (1, 1), (1, 0)}
    assert is_rep_cover(TOY, {0, 1, 2, 3, 4, 5, 6})
    assert not is_rep_cover(TOY, {0, 4, 2, 6})
    assert len(brute_force_minrep(TOY)) == len(branch_bound_minrep(TOY))


def test_malformed_minrep():
    with pytest.raises(MalformedInput):
        MinRepInstance(((0,),), ((1,), (2,)), frozenset())
    with pytest.raises(MalformedInput):
        MinRepInstance(((0,),), ((1,),), frozenset({(1, 0)}))
    with pytest.raises(MalformedInput):
        MinRepInstance(((0,), (1,)), ((2,), (3,)), frozenset({(0, 2)}))


@pytest.mark.parametrize("beta", [3, 4, 5])
def test_reduction_shape(beta):
    inst, rm = reduce_minrep_to_shortcut(TOY, beta)
    assert inst.n == 8 + 4 * 2 + (beta - 3) * 4
    assert inst.k == 4 and all(d == beta + 2 for d in inst.dist)
    assert all(l == 1 for _, _, l in inst.edges)
    for s, t in inst.demands:
        paths = simple_paths(inst.n, inst.edges, s, t, inst.n)
        assert paths and all(len(p) == beta + 2 for p, _ in paths)
    assert all_path_lengths_equal(inst)


def test_reduction_rejects_small_hopbound():
    with pytest.raises(BadHopbound):
        reduce_minrep_to_shortcut(TOY, 2)


def test_unequal_lengths_detected():
    inst = make_instance(5, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 4, 1), (4, 3, 1)], [], 1)
    assert not all_path_lengths_equal(inst)


def test_cover_round_trip_on_toy():
    cover = branch_bound_minrep(TOY)
    inst, rm = reduce_minrep_to_shortcut(TOY, 4)
    cl = weighted_transitive_closure(inst)
    S = cover_to_shortcut(TOY, 4, cover)
    assert len(S) == len(cover) and verify_hopset(inst, cl, S).feasible
    assert shortcut_to_cover(TOY, 4, S).vertices == cover.vertices
    with pytest.raises(InvalidCover):
        cover_to_shortcut(TOY, 4, {0})


def test_non_canonical_rejected():
    inst, rm = reduce_minrep_to_shortcut(TOY, 4)
    with pytest.raises(NotCanonical):
        shortcut_to_cover(TOY, 4, {(rm.a2(0), 4)})


@settings(max_examples=40)
@given(st.integers(0, 10**5), st.sampled_from([3, 4, 5]))
def test_canonicalization_doubles_at_most_and_stays_feasible(seed, beta):
    mr, _ = random_minrep(2, 2, 0.5, seed)
    inst, rm = reduce_minrep_to_shortcut(mr, beta)
    cl = weighted_transitive_closure(inst)
    rng = random.Random(seed)
    cand = sorted(cl.candidates)
    H = set(cand)
    # drop random arcs while the set stays feasible to get a small arbitrary shortcut set
    for e in rng.sample(cand, len(cand)):
        if verify_hopset(inst, cl, H - {e}).feasible:
            H.discard(e)
    canon = canonicalize_shortcut(mr, beta, H, inst, cl)
    assert len(canon) <= 2 * len(H)
    assert all(rm.is_canonical(e) for e in canon)
    assert verify_hopset(inst, cl, canon).feasible
    assert is_rep_cover(mr, shortcut_to_cover(mr, beta, canon).vertices)


@pytest.mark.parametrize("seed", range(12))
def test_minrep_oracles_agree_and_planted_is_optimal(seed):
    mr, planted = random_minrep(1 + seed % 3, 2, 0.4, seed)
    assert is_rep_cover(mr, planted.vertices)
    bf = brute_force_minrep(mr)
    assert len(bf) == len(branch_bound_minrep(mr)) == len(planted) == 2 * mr.m


@pytest.mark.parametrize("seed", range(6))
def test_shortcut_and_cover_optima_sandwich(seed):
    mr, _ = random_minrep(2, 2, 0.5, seed)
    beta = 3 + seed % 3
    inst, _ = reduce_minrep_to_shortcut(mr, beta)
    cl = weighted_transitive_closure(inst)
    sc = shared_split_opt(inst, cl).cost
    rep = len(branch_bound_minrep(mr))
    assert sc <= rep <= 2 * sc


def test_text_round_trip():
    mr, cover = random_minrep(3, 2, 0.3, 7)
    text = format_minrep(mr, cover)
    back, c2 = parse_minrep(text)
    assert back == mr and c2 == cover
    assert format_minrep(back, c2) == text
    with pytest.raises(MalformedInput):
        parse_minrep("MINREP 2\n")
    with pytest.raises(MalformedInput):
        parse_minrep(text + "junk\n")
