import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import simple_paths
from hopset.errors import NoFeasiblePath
from hopset.lp.hrsp import HrspQuery, hrsp_bounds, hrsp_exact, hrsp_fptas, hrsp_solve, path_cost, path_length


def brute_cheapest(q):
    best = None
    for path, length in simple_paths(q.n, [(u, v, l) for u, v, l, _ in q.arcs], q.s, q.t, q.beta):
        if length <= q.T:
            c = path_cost(q, path)
            best = c if best is None else min(best, c)
    return best


def random_query(rng, n=None, eps=Fraction(1, 10)):
    n = n or rng.randint(2, 8)
    arcs = []
    for u, v in itertools.permutations(range(n), 2):
        if rng.random() < 0.4:
            arcs.append((u, v, rng.randint(1, 5), Fraction(rng.randint(0, 6), rng.randint(1, 4))))
    s, t = rng.sample(range(n), 2)
    return HrspQuery(n, tuple(arcs), s, t, rng.randint(1, 12), rng.randint(1, 4), eps)


def valid(q, path):
    if not path or path[0][0] != q.s or path[-1][1] != q.t:
        return False
    if any(a[1] != b[0] for a, b in zip(path, path[1:])):
        return False
    return len(path) <= q.beta and path_length(q, path) <= q.T


def test_worked_example_prefers_cheaper_longer_route():
    arcs = ((0, 1, 1, Fraction(5)), (0, 2, 1, Fraction(1)), (2, 1, 1, Fraction(1)))
    q = HrspQuery(3, arcs, 0, 1, T=2, beta=2)
    assert hrsp_exact(q) == [(0, 2), (2, 1)]
    assert hrsp_solve(q) == [(0, 2), (2, 1)]
    # one hop only forces the expensive arc
    q1 = HrspQuery(3, arcs, 0, 1, T=2, beta=1)
    assert hrsp_solve(q1) == [(0, 1)]


def test_length_budget_excludes_route():
    arcs = ((0, 1, 3, Fraction(1)), (0, 2, 1, Fraction(2)), (2, 1, 1, Fraction(2)))
    q = HrspQuery(3, arcs, 0, 1, T=2, beta=2)
    assert hrsp_exact(q) == [(0, 2), (2, 1)]


def test_no_path_raises():
    q = HrspQuery(3, ((0, 1, 1, Fraction(1)),), 0, 2, T=5, beta=2)
    with pytest.raises(NoFeasiblePath):
        hrsp_bounds(q)
    with pytest.raises(NoFeasiblePath):
        hrsp_exact(q)


def test_bounds_bracket_optimum():
    rng = random.Random(4)
    seen = 0
    while seen < 40:
        q = random_query(rng)
        opt = brute_cheapest(q)
        if opt is None:
            continue
        seen += 1
        L, U = hrsp_bounds(q)
        assert L <= opt <= U


def test_invalid_query_parameters():
    with pytest.raises(ValueError):
        HrspQuery(2, (), 0, 1, T=-1, beta=1)
    with pytest.raises(ValueError):
        HrspQuery(2, (), 0, 1, T=1, beta=1, eps=Fraction(0))


def test_zero_cost_path_is_returned_without_scaling():
    arcs = ((0, 1, 1, Fraction(0)), (1, 2, 1, Fraction(0)), (0, 2, 1, Fraction(3)))
    q = HrspQuery(3, arcs, 0, 2, T=2, beta=2)
    assert path_cost(q, hrsp_solve(q)) == 0


@pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)])
def test_exact_matches_brute_force_and_fptas_within_factor(eps):
    rng = random.Random(int(1 / eps))
    checked = 0
    for _ in range(120):
        q = random_query(rng, eps=eps)
        opt = brute_cheapest(q)
        if opt is None:
            with pytest.raises(NoFeasiblePath):
                hrsp_solve(q)
            continue
        checked += 1
        exact = hrsp_exact(q)
        assert valid(q, exact) and path_cost(q, exact) == opt
        L, U = hrsp_bounds(q)
        if L > 0:
            p = hrsp_fptas(q, L, U)
            assert valid(q, p) and path_cost(q, p) <= (1 + eps) * opt
    assert checked > 20


@given(st.integers(0, 10**6))
def test_solver_output_always_within_budgets(seed):
    q = random_query(random.Random(seed))
    try:
        p = hrsp_solve(q)
    except NoFeasiblePath:
        assert brute_cheapest(q) is None
        return
    assert valid(q, p)
    assert path_cost(q, p) <= (1 + q.eps) * brute_cheapest(q)
