"""Command line: solve, generate, oracle, bench, compile-flight.

Exit codes: 0 optimal / complete run, 2 infeasible, 3 limit reached,
64 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path as FsPath

from . import bench
from .branching import BRANCH_RULES
from .generate import GenParams, generate
from .io import ParseError, load, save, write_lcsp
from .nodesel import NODE_RULES
from .oracle import TooLarge, brute_force_solve
from .solver import SolverConfig, solve

EXIT_OK, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_USAGE = 0, 2, 3, 64
STATUS_EXIT = {"Optimal": EXIT_OK, "Infeasible": EXIT_INFEASIBLE, "LimitReached": EXIT_LIMIT}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    d = SolverConfig()
    g = p.add_argument_group("solver configuration")
    g.add_argument("--node-selection", choices=NODE_RULES, default=d.node_selection)
    g.add_argument("--branching", choices=BRANCH_RULES, default=d.branching)
    g.add_argument("--conflict", choices=("standard", "graph"), default=d.conflict)
    g.add_argument("--epsilon", type=float, default=d.epsilon, help="product-rule floor")
    g.add_argument("--lookahead", type=int, default=d.lookahead, help="strong-branching look-ahead L")
    g.add_argument("--cvds-bump", type=float, default=d.cvds_bump)
    g.add_argument("--cvds-decay", type=float, default=d.cvds_decay)
    g.add_argument("--cvds-interval", type=int, default=d.cvds_interval)
    g.add_argument("--pure-literals", action="store_true")
    g.add_argument("--node-limit", type=int, default=None)
    g.add_argument("--time-limit", type=float, default=None, help="seconds")
    g.add_argument("--sp-engine", choices=("lpa", "static"), default=d.sp_engine)
    g.add_argument("--no-parent-check", dest="parent_check", action="store_false")
    g.add_argument("--plunge-depth", type=int, default=d.plunge_depth)


def _config(args) -> SolverConfig:
    names = {f.name for f in fields(SolverConfig)}
    kw = {k: v for k, v in vars(args).items() if k in names}
    try:
        return SolverConfig(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _print_solution(sol, stats, inst, out) -> None:
    scale = inst.dag.weight_scale
    print(f"status {sol.status}", file=out)
    if sol.path is not None:
        cost = sol.cost if scale == 1 else sol.cost / scale
        print(f"cost {cost}", file=out)
        print("path " + " ".join(map(str, sol.path.arcs)), file=out)
    if stats is not None:
        print(f"nodes {stats.nodes}", file=out)
        print(f"sp_searches {stats.sp_searches}", file=out)
        print(f"arc_relaxations {stats.arc_relaxations}", file=out)
        print(f"time_s {stats.time_total:.6f}", file=out)


def cmd_solve(args) -> int:
    inst = load(args.instance)
    sol, st = solve(inst, _config(args))
    _print_solution(sol, st, inst, sys.stdout)
    return STATUS_EXIT[sol.status]


def cmd_oracle(args) -> int:
    inst = load(args.instance)
    try:
        sol = brute_force_solve(inst, args.max_paths, args.max_free)
    except TooLarge as e:
        print(f"status LimitReached ({e})")
        return EXIT_LIMIT
    _print_solution(sol, None, inst, sys.stdout)
    return STATUS_EXIT[sol.status]


def _gen_params(args) -> GenParams:
    try:
        return GenParams(vertices=args.vertices, arcs=args.arcs, restrictions=args.restrictions,
                         clause_size=args.clause_size, dnf_clauses=args.dnf_clauses,
                         free_var_rate=args.free_var_rate,
                         weight_range=(args.min_weight, args.max_weight))
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_generate(args) -> int:
    if args.min_weight > args.max_weight or args.min_weight < 0:
        raise UsageError("need 0 <= min-weight <= max-weight")
    inst = generate(args.seed, _gen_params(args))
    if args.output:
        save(inst, args.output)
    else:
        sys.stdout.write(write_lcsp(inst))
    return EXIT_OK


def _csv_list(text: str, allowed) -> list[str]:
    items = [x for x in text.split(",") if x] if text else []
    bad = [x for x in items if x not in allowed]
    if bad:
        raise UsageError(f"unknown rule(s) {', '.join(bad)}")
    return items


def cmd_bench(args) -> int:
    if args.instances:
        insts = [load(p) for p in args.instances]
    elif args.suite == "hard":
        insts = bench.hard_suite(args.count, first_seed=args.first_seed)
    else:
        insts = bench.seeded_suite(args.count, first_seed=args.first_seed)
    configs = bench.config_matrix(_csv_list(args.node_rules, NODE_RULES),
                                  _csv_list(args.branch_rules, BRANCH_RULES),
                                  _csv_list(args.conflicts, ("standard", "graph")),
                                  sp_engine=args.sp_engine)
    if args.with_baseline and not any(c.label == bench.BASELINE.label for c in configs):
        configs.insert(0, bench.BASELINE)
    rows = bench.run_benchmark(insts, configs, args.node_limit, args.time_limit, args.workers)
    text = bench.rows_to_csv(rows)
    if args.output:
        FsPath(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    summary = bench.summarize(rows, threshold=args.trivial_nodes)
    if args.summary:
        FsPath(args.summary).write_text(bench.summary_to_csv(summary))
    if args.cdf:
        FsPath(args.cdf).write_text(bench.cdf_to_csv(bench.cdf_rows(rows, args.cdf_metric), args.cdf_metric))
    return EXIT_OK


def cmd_compile_flight(args) -> int:
    from .flight import EmptySearchSpace, FlightDataset, UnknownAirport, compile_flight

    ds = FlightDataset.load(args.dataset)
    if args.origin and args.destination:
        od = (args.origin, args.destination)
    elif ds.od_pairs:
        if not 0 <= args.od_index < len(ds.od_pairs):
            raise UsageError(f"OD index {args.od_index} out of range")
        od = ds.od_pairs[args.od_index]
    else:
        raise UsageError("no OD pair given and none in the dataset")
    try:
        ci = compile_flight(ds.network, ds.tfrs, od[0], od[1], ds.levels,
                            ellipse_factor=args.ellipse)
    except UnknownAirport as e:
        raise UsageError(str(e)) from None
    except EmptySearchSpace as e:
        print(f"status Infeasible ({e})")
        return EXIT_INFEASIBLE
    inst = ci.instance
    print(f"compiled {od[0]}-{od[1]}: {inst.dag.num_vertices} vertices, {inst.dag.num_arcs} arcs, "
          f"{inst.formula.num_vars} variables, {len(inst.formula.clauses)} clauses, "
          f"{len(ci.dropped)} TFRs dropped", file=sys.stderr)
    if args.output:
        save(inst, args.output)
    if not args.solve:
        if not args.output:
            sys.stdout.write(write_lcsp(inst))
        return EXIT_OK
    sol, st = solve(inst, _config(args))
    _print_solution(sol, st, inst, sys.stdout)
    if sol.path is not None:
        route = " ".join(f"{v.waypoint}@{v.level}" for v in ci.route(sol.path))
        print(f"route {route}")
        print(f"fuel_kg {ci.fuel_kg(sol.path):.3f}")
        print(f"duration_s {ci.duration_s(sol.path):.1f}")
    return STATUS_EXIT[sol.status]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lcsp", description="Logic-constrained shortest path solver suite")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    _add_config_flags(s)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force an instance file")
    o.add_argument("instance")
    o.add_argument("--max-paths", type=int, default=10**6)
    o.add_argument("--max-free", type=int, default=2**20)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("generate", help="write a seeded random instance")
    d = GenParams()
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--vertices", type=int, default=d.vertices)
    g.add_argument("--arcs", type=int, default=d.arcs)
    g.add_argument("--restrictions", type=int, default=d.restrictions)
    g.add_argument("--clause-size", type=int, default=d.clause_size)
    g.add_argument("--dnf-clauses", type=int, default=d.dnf_clauses)
    g.add_argument("--free-var-rate", type=float, default=d.free_var_rate)
    g.add_argument("--min-weight", type=int, default=d.weight_range[0])
    g.add_argument("--max-weight", type=int, default=d.weight_range[1])
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run a configuration matrix and tabulate")
    b.add_argument("instances", nargs="*", help="instance files (default: a seeded suite)")
    b.add_argument("--suite", choices=("oracle", "hard"), default="oracle")
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--first-seed", type=int, default=0)
    b.add_argument("--node-rules", default="dfs")
    b.add_argument("--branch-rules", default="clause")
    b.add_argument("--conflicts", default="standard")
    b.add_argument("--with-baseline", action="store_true",
                   help="add DFS + clause + standard conflicts if missing")
    b.add_argument("--sp-engine", choices=("lpa", "static"), default="lpa")
    b.add_argument("--node-limit", type=int)
    b.add_argument("--time-limit", type=float)
    b.add_argument("--workers", type=int, default=None,
                   help=f"parallel solves (default from ${bench.THREADS_ENV}, else 1)")
    b.add_argument("--trivial-nodes", type=int, default=bench.TRIVIAL_NODES)
    b.add_argument("-o", "--output", help="row CSV (default stdout)")
    b.add_argument("--summary", help="summary CSV path")
    b.add_argument("--cdf", help="cumulative distribution CSV path")
    b.add_argument("--cdf-metric", choices=("nodes", "sp_searches"), default="nodes")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("compile-flight", help="compile a flight dataset OD pair")
    c.add_argument("dataset", help="dataset directory")
    c.add_argument("--origin")
    c.add_argument("--destination")
    c.add_argument("--od-index", type=int, default=0)
    c.add_argument("--ellipse", type=float, default=1.2)
    c.add_argument("-o", "--output", help="write the core instance file")
    c.add_argument("--solve", action="store_true", help="also solve and print the route")
    _add_config_flags(c)
    c.set_defaults(func=cmd_compile_flight)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"lcsp: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FileNotFoundError, IsADirectoryError) as e:
        print(f"lcsp: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
