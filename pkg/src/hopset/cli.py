"""Command-line front end: ``hopset <solve|verify|lp|gen|bench|oracle> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .bench import SWEEP_ALGORITHMS, SweepConfig, format_csv, run_sweep
from .errors import HopsetError
from .existential import folklore_exact_hopset, parse_mask, tradeoff_driver
from .instance import brute_force_opt, verify_hopset, weighted_transitive_closure
from .io import format_instance, load_solution_edges, parse_instance, random_instance, solution_to_dict
from .junction import junction_tree_hopset
from .lp.cutgen import solve_hopset_lp, write_cuts
from .minrep import format_minrep, random_minrep, reduce_minrep_to_shortcut
from .rounding import sqrt_opt_algorithm, two_hop_rounding

SOLVERS = ("sqrt-opt", "two-hop", "junction-tree", "folklore", "portfolio")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="64-bit run seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="hopset", description="Approximate minimum hopsets and shortcut sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="compute a hopset")
    p.add_argument("instance")
    p.add_argument("--algo", choices=SOLVERS, default="portfolio")
    p.add_argument("--c", type=float, default=4.0, help="threshold constant of two-hop rounding")
    p.add_argument("--eps", type=Fraction, default=Fraction(1, 10), help="LP accuracy")
    p.add_argument("--exact-jt", action="store_true", help="exhaustive junction-tree finder")
    p.add_argument("--mask", help="comma-separated portfolio members")
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("verify", parents=[common], help="check a hopset against an instance")
    p.add_argument("instance")
    p.add_argument("solution", help="JSON report or JSON list of [u, v] pairs")

    p = sub.add_parser("lp", parents=[common], help="solve the fractional relaxation")
    p.add_argument("instance")
    p.add_argument("--eps", type=Fraction, default=Fraction(1, 10))
    p.add_argument("--dump-cuts", help="write the final cut pool to this file")

    p = sub.add_parser("gen", parents=[common], help="generate instances")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("random", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--beta", type=int, required=True)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--demands", type=int, default=4)
    g.add_argument("--max-length", type=int, default=5)
    g.add_argument("--undirected", action="store_true")
    g.add_argument("--backbone", action="store_true", help="start from a random Hamiltonian path")
    g.add_argument("--hard", action="store_true", help="prefer demands the input arcs cannot settle")
    g.add_argument("--out")
    g = gsub.add_parser("minrep", parents=[common])
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--group", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--edge-density", type=float)
    g.add_argument("--beta", type=int, required=True)
    g.add_argument("--out", required=True, help="reduced instance; the Min-Rep source goes to <out>.minrep")

    p = sub.add_parser("bench", parents=[common], help="sweep a directory of instances into CSV")
    p.add_argument("directory")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--algos", default=",".join(SOLVERS[:4]), help=f"subset of {','.join(SWEEP_ALGORITHMS)}")
    p.add_argument("--seeds", default=None, help="comma-separated seeds (default: --seed)")
    p.add_argument("--opt-cap", type=int, default=18)
    p.add_argument("--timing", action="store_true", help="add a runtime_ms column")

    p = sub.add_parser("oracle", parents=[common], help="brute-force optimum")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=20)
    return ap


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = parse_instance(args.instance)
    closure = weighted_transitive_closure(inst)
    start = time.perf_counter()
    extra = {}
    if args.algo == "sqrt-opt":
        sol = sqrt_opt_algorithm(inst, closure, args.seed, args.eps)
    elif args.algo == "two-hop":
        sol = two_hop_rounding(inst, closure, args.c, args.seed, args.eps)
    elif args.algo == "junction-tree":
        sol = junction_tree_hopset(inst, closure, exact=args.exact_jt)
    elif args.algo == "folklore":
        sol = folklore_exact_hopset(inst, closure, None, args.seed)
    else:
        res = tradeoff_driver(inst, closure, args.seed, parse_mask(args.mask), args.eps, args.c)
        sol = res.chosen
        extra["portfolio"] = [e.as_row() for e in res.entries]
    ms = round((time.perf_counter() - start) * 1000, 3)
    report = solution_to_dict(sol, ms)
    report.update(extra)
    _emit(report, args.out)
    return 0


def cmd_verify(args) -> int:
    inst = parse_instance(args.instance)
    closure = weighted_transitive_closure(inst)
    rep = verify_hopset(inst, closure, load_solution_edges(args.solution))
    if args.json:
        _emit({"feasible": rep.feasible, "cost": rep.cost, "per_demand": [r.as_dict() for r in rep.records]})
    else:
        for r in rep.records:
            print(f"{r.s} {r.t} {'settled' if r.settled else 'OPEN'} hops={r.hops} length={r.length} dist={r.dist}")
        print(f"cost {rep.cost} feasible {rep.feasible}")
    return 0 if rep.feasible else 1


def cmd_lp(args) -> int:
    inst = parse_instance(args.instance)
    closure = weighted_transitive_closure(inst)
    sol = solve_hopset_lp(inst, closure, args.eps)
    if args.dump_cuts:
        with open(args.dump_cuts, "w") as fh:
            write_cuts(sol.cuts, fh)
    values = [(e, sol.x[e]) for e in closure.edges]
    if args.json:
        _emit({"objective": str(sol.objective),
               "x": [[u, v, str(x)] for (u, v), x in values],
               "stats": {k: str(v) for k, v in sol.stats.items()}})
    else:
        print(f"objective {sol.objective.numerator}/{sol.objective.denominator}")
        for (u, v), x in values:
            print(f"{u} {v} {x.numerator}/{x.denominator}")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "random":
        inst = random_instance(args.n, args.beta, args.seed, args.density, args.max_length, args.demands,
                               directed=not args.undirected, backbone=args.backbone, hard=args.hard)
        text = format_instance(inst)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    mr, cover = random_minrep(args.m, args.group, args.density, args.seed, args.edge_density)
    inst, _ = reduce_minrep_to_shortcut(mr, args.beta)
    Path(args.out).write_text(format_instance(inst))
    Path(args.out + ".minrep").write_text(format_minrep(mr, cover))
    return 0


def cmd_bench(args) -> int:
    seeds = tuple(int(x) for x in args.seeds.split(",")) if args.seeds else (args.seed,)
    cfg = SweepConfig(directory=args.directory, algorithms=tuple(x for x in args.algos.split(",") if x),
                      seeds=seeds, out=args.out, opt_cap=args.opt_cap, timing=args.timing,
                      threads=args.threads)
    rows = run_sweep(cfg)
    if not args.out:
        sys.stdout.write(format_csv(rows, args.timing))
    return 0


def cmd_oracle(args) -> int:
    inst = parse_instance(args.instance)
    closure = weighted_transitive_closure(inst)
    sol = brute_force_opt(inst, closure, args.cap)
    if args.json:
        _emit(solution_to_dict(sol))
    else:
        print(f"opt {sol.cost}")
        for u, v in sol.edges:
            print(f"{u} {v}")
    return 0


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "lp": cmd_lp, "gen": cmd_gen,
            "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except HopsetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
