"""
Comparing branching and node-selection rules
============================================

Generates a small suite of hard instances, runs the baseline (depth-first,
first literal of the smallest violated clause, standard conflicts) against
best-first search with several branching rules on graph conflicts, and
prints the geometric means over the non-trivial instances.

Set LCSP_BENCH_WORKERS to run solves in parallel.
"""

import sys

from lcsp.bench import BASELINE, hard_suite, run_benchmark, summarize
from lcsp.solver import SolverConfig

count = int(sys.argv[1]) if len(sys.argv) > 1 else 10
instances = hard_suite(count)
print(f"{len(instances)} instances, first seeds: {[i.name for i in instances[:5]]}")

configs = [BASELINE] + [SolverConfig(node_selection="best_first", branching=b, conflict="graph")
                        for b in ("clause", "moms", "sup", "dup", "cvds", "strong")]
rows = run_benchmark(instances, configs)

base = None
print(f"{'config':28s} {'nodes':>8s} {'SP':>8s} {'SP/base':>8s}")
for e in summarize(rows):
    sp = e["gmean_sp_searches"]
    base = base or sp
    print(f"{e['config']:28s} {e['gmean_nodes']:8.2f} {sp:8.2f} {sp / base:8.2f}")
