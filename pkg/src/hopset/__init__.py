"""Approximately minimum hopsets and shortcut sets.

Typical use::

    from hopset import parse_instance, weighted_transitive_closure, tradeoff_driver
    inst = parse_instance("graph.txt")
    closure = weighted_transitive_closure(inst)
    best = tradeoff_driver(inst, closure, seed=1).chosen
"""

from .errors import (
    BadHopbound,
    CapExceeded,
    ForeignEdge,
    HopsetError,
    InfeasibleDemand,
    IterationLimit,
    MalformedInput,
    NumericalFailure,
    WrongHopbound,
)
from .existential import folklore_exact_hopset, register_external_construction, tradeoff_driver
from .instance import (
    HopsetInstance,
    HopsetSolution,
    Stretch,
    WeightedClosure,
    brute_force_opt,
    exhaustive_opt_dfs,
    hop_bounded_distance,
    make_instance,
    normalize_instance,
    verify_hopset,
    weighted_transitive_closure,
)
from .io import parse_instance, random_instance, write_instance
from .junction import build_layered_graph, junction_tree_hopset, min_density_junction_tree
from .lp.cutgen import solve_hopset_lp
from .rounding import sqrt_opt_algorithm, two_hop_rounding

__all__ = [
    "BadHopbound",
    "CapExceeded",
    "ForeignEdge",
    "HopsetError",
    "HopsetInstance",
    "HopsetSolution",
    "InfeasibleDemand",
    "IterationLimit",
    "MalformedInput",
    "NumericalFailure",
    "Stretch",
    "WeightedClosure",
    "WrongHopbound",
    "brute_force_opt",
    "build_layered_graph",
    "exhaustive_opt_dfs",
    "folklore_exact_hopset",
    "hop_bounded_distance",
    "junction_tree_hopset",
    "make_instance",
    "min_density_junction_tree",
    "normalize_instance",
    "parse_instance",
    "random_instance",
    "register_external_construction",
    "solve_hopset_lp",
    "sqrt_opt_algorithm",
    "tradeoff_driver",
    "two_hop_rounding",
    "verify_hopset",
    "weighted_transitive_closure",
    "write_instance",
]
