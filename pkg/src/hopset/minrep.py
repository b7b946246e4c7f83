"""Min-Rep instances and their reduction to shortcut-set instances.

Vertex ids of the reduced graph G' are laid out as

* the Min-Rep vertices ``A`` then ``B`` (same ids as in the Min-Rep instance),
* ``a1_i, a2_i, b1_i, b2_i`` for every group index ``i``,
* ``beta - 3`` inner vertices for every Min-Rep edge, edges in sorted order.

Every arc has unit length.  A superedge ``(i, j)`` becomes the demand
``(a1_i, b1_j)`` whose every path has ``beta + 2`` arcs:
``a1_i -> a2_i -> a -> (beta - 2 arcs) -> b -> b2_j -> b1_j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import BadHopbound, CapExceeded, Infeasible, InvalidCover, MalformedInput, NotCanonical
from .instance import HopsetInstance, WeightedClosure, make_instance, verify_hopset
from .rng import make_rng


@dataclass(frozen=True)
class MinRepInstance:
    """``groups_a[i]``/``groups_b[j]`` list vertex ids; ``edges`` holds ``(a, b)`` pairs."""

    groups_a: tuple
    groups_b: tuple
    edges: frozenset

    def __post_init__(self):
        if len(self.groups_a) != len(self.groups_b) or not self.groups_a:
            raise MalformedInput("need the same positive number of A and B groups")
        sizes = {len(g) for g in self.groups_a + self.groups_b}
        if len(sizes) != 1 or 0 in sizes:
            raise MalformedInput("all groups must have the same positive size")
        seen = [v for g in self.groups_a + self.groups_b for v in g]
        if len(seen) != len(set(seen)) or sorted(seen) != list(range(len(seen))):
            raise MalformedInput("groups must partition the ids 0..|A|+|B|-1")
        for a, b in self.edges:
            if a not in self.group_of_a or b not in self.group_of_b:
                raise MalformedInput(f"edge {(a, b)} must join A to B")
        used_a = {i for i, _ in self.superedges}
        used_b = {j for _, j in self.superedges}
        if len(used_a) != self.m or len(used_b) != self.m:
            raise MalformedInput("every group must take part in a superedge")

    @property
    def m(self) -> int:
        return len(self.groups_a)

    @property
    def group_size(self) -> int:
        return len(self.groups_a[0])

    @cached_property
    def group_of_a(self) -> dict:
        return {v: i for i, g in enumerate(self.groups_a) for v in g}

    @cached_property
    def group_of_b(self) -> dict:
        return {v: j for j, g in enumerate(self.groups_b) for v in g}

    @property
    def num_vertices(self) -> int:
        return 2 * self.m * self.group_size

    @cached_property
    def superedges(self) -> tuple:
        return tuple(sorted({(self.group_of_a[a], self.group_of_b[b]) for a, b in self.edges}))

    def covering_edges(self, i: int, j: int) -> list:
        return sorted((a, b) for a, b in self.edges if self.group_of_a[a] == i and self.group_of_b[b] == j)


def is_rep_cover(mr: MinRepInstance, S) -> bool:
    S = set(S)
    return all(any(a in S and b in S for a, b in mr.covering_edges(i, j)) for i, j in mr.superedges)


@dataclass(frozen=True)
class RepCover:
    vertices: frozenset

    def __len__(self) -> int:
        return len(self.vertices)


def _cover(mr: MinRepInstance, S) -> RepCover:
    if not is_rep_cover(mr, S):
        raise InvalidCover("vertex set misses a superedge")
    return RepCover(frozenset(S))


# --------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class ReductionMap:
    """Vertex bookkeeping of the reduced graph."""

    mr: MinRepInstance = field(repr=False)
    beta: int

    @property
    def base(self) -> int:
        return self.mr.num_vertices

    def a1(self, i: int) -> int:
        return self.base + i

    def a2(self, i: int) -> int:
        return self.base + self.mr.m + i

    def b1(self, j: int) -> int:
        return self.base + 2 * self.mr.m + j

    def b2(self, j: int) -> int:
        return self.base + 3 * self.mr.m + j

    @cached_property
    def edge_order(self) -> tuple:
        return tuple(sorted(self.mr.edges))

    def inner(self, e) -> list:
        k = self.edge_order.index(e)
        start = self.base + 4 * self.mr.m + k * (self.beta - 3)
        return list(range(start, start + self.beta - 3))

    @property
    def num_vertices(self) -> int:
        return self.base + 4 * self.mr.m + (self.beta - 3) * len(self.mr.edges)

    @cached_property
    def inner_owner(self) -> dict:
        return {v: e for e in self.edge_order for v in self.inner(e)}

    def a_side_group(self, u: int):
        """Group index fixed by a tail vertex of a useful arc, if any."""
        mr = self.mr
        if u in mr.group_of_a:
            return mr.group_of_a[u]
        if self.base <= u < self.base + 2 * mr.m:
            return (u - self.base) % mr.m
        if u in self.inner_owner:
            return mr.group_of_a[self.inner_owner[u][0]]
        return None

    def b_side_group(self, v: int):
        mr = self.mr
        if v in mr.group_of_b:
            return mr.group_of_b[v]
        if self.base + 2 * mr.m <= v < self.base + 4 * mr.m:
            return (v - self.base) % mr.m
        if v in self.inner_owner:
            return mr.group_of_b[self.inner_owner[v][1]]
        return None

    def is_canonical(self, e) -> bool:
        u, v = e
        mr = self.mr
        if v in mr.group_of_a:
            return u == self.a1(mr.group_of_a[v])
        if u in mr.group_of_b:
            return v == self.b1(mr.group_of_b[u])
        return False


def reduce_minrep_to_shortcut(mr: MinRepInstance, beta: int):
    """Build G' with its demands; returns ``(instance, reduction map)``."""
    if beta < 3:
        raise BadHopbound(f"the reduction needs hopbound >= 3, got {beta}")
    rm = ReductionMap(mr, beta)
    arcs = []
    for i in range(mr.m):
        arcs.append((rm.a1(i), rm.a2(i)))
        arcs.extend((rm.a2(i), x) for x in mr.groups_a[i])
        arcs.extend((y, rm.b2(i)) for y in mr.groups_b[i])
        arcs.append((rm.b2(i), rm.b1(i)))
    for e in rm.edge_order:
        chain = [e[0]] + rm.inner(e) + [e[1]]
        arcs.extend(zip(chain, chain[1:]))
    demands = [(rm.a1(i), rm.b1(j), beta + 2) for i, j in mr.superedges]
    inst = make_instance(rm.num_vertices, [(u, v, 1) for u, v in arcs], demands, beta)
    return inst, rm


def cover_to_shortcut(mr: MinRepInstance, beta: int, S) -> frozenset:
    """Arcs ``(a1_i, x)`` and ``(y, b1_j)`` for the cover's members; one arc per member."""
    S = S.vertices if isinstance(S, RepCover) else frozenset(S)
    if not is_rep_cover(mr, S):
        raise InvalidCover("vertex set misses a superedge")
    rm = ReductionMap(mr, beta)
    out = set()
    for x in S:
        if x in mr.group_of_a:
            out.add((rm.a1(mr.group_of_a[x]), x))
        else:
            out.add((x, rm.b1(mr.group_of_b[x])))
    return frozenset(out)


def canonicalize_shortcut(mr: MinRepInstance, beta: int, S, inst: HopsetInstance | None = None,
                          closure: WeightedClosure | None = None) -> frozenset:
    """Swap each non-canonical arc for the two canonical arcs of the smallest
    Min-Rep edge of the superedge that arc can serve."""
    rm = ReductionMap(mr, beta)
    if inst is not None and closure is not None and not verify_hopset(inst, closure, S).feasible:
        raise Infeasible("input is not a shortcut set of the reduced graph")
    out = set()
    for u, v in S:
        if rm.is_canonical((u, v)):
            out.add((u, v))
            continue
        i, j = rm.a_side_group(u), rm.b_side_group(v)
        if i is None or j is None or (i, j) not in mr.superedges:
            raise Infeasible(f"arc {(u, v)} lies on no demand path")
        a, b = mr.covering_edges(i, j)[0]
        out.add((rm.a1(i), a))
        out.add((b, rm.b1(j)))
    return frozenset(out)


def shortcut_to_cover(mr: MinRepInstance, beta: int, S) -> RepCover:
    """Min-Rep endpoints of a canonical shortcut set."""
    rm = ReductionMap(mr, beta)
    picked = set()
    for u, v in S:
        if not rm.is_canonical((u, v)):
            raise NotCanonical(f"arc {(u, v)} is not canonical")
        picked.add(v if v in mr.group_of_a else u)
    return _cover(mr, picked)


# --------------------------------------------------------------------------
# oracles


def brute_force_minrep(mr: MinRepInstance, cap: int = 16) -> RepCover:
    """Minimum cover by subsets of increasing size, lexicographically first."""
    n = mr.num_vertices
    if n > cap:
        raise CapExceeded(f"{n} Min-Rep vertices exceed the cap of {cap}")
    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            if is_rep_cover(mr, S):
                return RepCover(frozenset(S))
    raise AssertionError("unreachable: all vertices form a cover")


def branch_bound_minrep(mr: MinRepInstance) -> RepCover:
    """Minimum cover by branching on the Min-Rep edge covering the first open superedge."""
    supers = mr.superedges
    options = [mr.covering_edges(i, j) for i, j in supers]
    best = [frozenset(v for g in mr.groups_a + mr.groups_b for v in g)]

    def rec(S: frozenset, idx: int):
        while idx < len(supers) and any(a in S and b in S for a, b in options[idx]):
            idx += 1
        if idx == len(supers):
            if len(S) < len(best[0]):
                best[0] = S
            return
        for a, b in options[idx]:
            T = S | {a, b}
            if len(T) < len(best[0]):
                rec(T, idx + 1)

    rec(frozenset(), 0)
    return RepCover(best[0])


def all_path_lengths_equal(inst: HopsetInstance) -> bool:
    """True when every pair joined in the (acyclic) graph has one path length."""
    out = [[] for _ in range(inst.n)]
    for u, v, l in inst.edges:
        out[u].append((v, l))
    memo: dict = {}

    def lengths(u):
        # map target -> set of path lengths from u
        if u in memo:
            return memo[u]
        memo[u] = None
        res: dict = {}
        for v, l in out[u]:
            sub = lengths(v)
            if sub is None:
                raise ValueError("graph has a cycle")
            res.setdefault(v, set()).add(l)
            for w, ls in sub.items():
                res.setdefault(w, set()).update(x + l for x in ls)
        memo[u] = res
        return res

    return all(len(ls) == 1 for u in range(inst.n) for ls in lengths(u).values())


# --------------------------------------------------------------------------
# generation and text format


def random_minrep(m: int, group: int, density: float, seed: int, edge_density: float | None = None):
    """Random instance with a planted cover of one vertex per group.

    Superedges: a random perfect matching of groups plus each further group
    pair with probability ``density``.  Each superedge gets the planted
    representative edge plus every other A-B pair with probability
    ``edge_density`` (default ``density``).
    Returns ``(instance, planted cover)``.
    """
    if m < 1 or group < 1:
        raise ValueError("need m >= 1 and group >= 1")
    edge_density = density if edge_density is None else edge_density
    rng = make_rng(seed, "minrep")
    groups_a = tuple(tuple(range(i * group, (i + 1) * group)) for i in range(m))
    off = m * group
    groups_b = tuple(tuple(range(off + j * group, off + (j + 1) * group)) for j in range(m))
    rep_a = [g[int(rng.integers(0, group))] for g in groups_a]
    rep_b = [g[int(rng.integers(0, group))] for g in groups_b]
    match = [int(x) for x in rng.permutation(m)]
    supers = {(i, match[i]) for i in range(m)}
    for i in range(m):
        for j in range(m):
            if rng.random() < density:
                supers.add((i, j))
    edges = set()
    for i, j in sorted(supers):
        edges.add((rep_a[i], rep_b[j]))
        for a in groups_a[i]:
            for b in groups_b[j]:
                if rng.random() < edge_density:
                    edges.add((a, b))
    mr = MinRepInstance(groups_a, groups_b, frozenset(edges))
    return mr, RepCover(frozenset(rep_a + rep_b))


def format_minrep(mr: MinRepInstance, cover: RepCover | None = None) -> str:
    """``MINREP 1`` / ``<m> <group> <edges>`` / edge lines ``<a> <b>`` / optional ``COVER`` line.

    Group ``i`` of A holds ids ``i*g .. i*g+g-1``; B ids follow all of A.
    """
    lines = ["MINREP 1", f"{mr.m} {mr.group_size} {len(mr.edges)}"]
    lines += [f"{a} {b}" for a, b in sorted(mr.edges)]
    if cover is not None:
        lines.append("COVER " + " ".join(str(v) for v in sorted(cover.vertices)))
    return "\n".join(lines) + "\n"


def parse_minrep(text: str):
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not rows or rows[0][1] != ["MINREP", "1"]:
        raise MalformedInput("expected 'MINREP 1'", 1)
    if len(rows) < 2 or len(rows[1][1]) != 3:
        raise MalformedInput("expected '<m> <group> <edges>'", 2)
    try:
        m, g, k = (int(x) for x in rows[1][1])
        edges = set()
        for no, toks in rows[2:2 + k]:
            if len(toks) != 2:
                raise MalformedInput("edge line needs two ids", no)
            edges.add((int(toks[0]), int(toks[1])))
    except ValueError:
        raise MalformedInput("non-integer token") from None
    if len(rows) < 2 + k:
        raise MalformedInput("file ends before all edge lines")
    groups_a = tuple(tuple(range(i * g, (i + 1) * g)) for i in range(m))
    groups_b = tuple(tuple(range(m * g + j * g, m * g + (j + 1) * g)) for j in range(m))
    mr = MinRepInstance(groups_a, groups_b, frozenset(edges))
    cover = None
    for no, toks in rows[2 + k:]:
        if toks[0] != "COVER":
            raise MalformedInput("unexpected trailing content", no)
        cover = RepCover(frozenset(int(x) for x in toks[1:]))
    return mr, cover


def write_minrep(mr: MinRepInstance, path, cover: RepCover | None = None) -> None:
    Path(path).write_text(format_minrep(mr, cover))


__all__ = [
    "MinRepInstance",
    "ReductionMap",
    "RepCover",
    "all_path_lengths_equal",
    "branch_bound_minrep",
    "brute_force_minrep",
    "canonicalize_shortcut",
    "cover_to_shortcut",
    "format_minrep",
    "is_rep_cover",
    "parse_minrep",
    "random_minrep",
    "reduce_minrep_to_shortcut",
    "shortcut_to_cover",
    "write_minrep",
]
