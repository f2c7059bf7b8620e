"""Benchmark harness: run configurations over instances, tabulate, summarize."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Sequence

from .generate import GenParams, generate
from .solver import LcspInstance, SolverConfig, solve

log = logging.getLogger(__name__)

THREADS_ENV = "LCSP_BENCH_WORKERS"
BASELINE = SolverConfig(node_selection="dfs", branching="clause", conflict="standard")
TRIVIAL_NODES = 10
METRICS = ("nodes", "sp_searches", "arc_relaxations", "time_total_s", "time_sp_s")


@dataclass
class ResultRow:
    instance: str
    config: str
    status: str
    cost: str
    nodes: int
    sp_searches: int
    arc_relaxations: int
    time_total_s: float
    time_sp_s: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return 1


def _format_cost(cost, scale) -> str:
    if cost == math.inf:
        return ""
    if scale == 1:
        return str(cost)
    return repr(cost / scale)


def run_one(instance: LcspInstance, config: SolverConfig) -> ResultRow:
    name = instance.name
    try:
        sol, st = solve(instance, config)
    except Exception as exc:  # recorded, never aborts the run
        log.exception("solve failed on %s with %s", name, config.label)
        return ResultRow(name, config.label, f"Error:{type(exc).__name__}", "", 0, 0, 0, 0.0, 0.0)
    return ResultRow(name, config.label, sol.status, _format_cost(sol.cost, instance.dag.weight_scale),
                     st.nodes, st.sp_searches, st.arc_relaxations,
                     round(st.time_total, 6), round(st.time_sp, 6))


def _job(args):
    return run_one(*args)


def run_benchmark(instances: Sequence[LcspInstance], configs: Sequence[SolverConfig],
                  node_limit: int | None = None, time_limit: float | None = None,
                  workers: int | None = None) -> list[ResultRow]:
    """One row per (instance, config), ordered by instance then config
    regardless of the completion order of parallel workers."""
    limited = [replace(c, node_limit=node_limit if node_limit is not None else c.node_limit,
                       time_limit=time_limit if time_limit is not None else c.time_limit)
               for c in configs]
    jobs = [(inst, cfg) for inst in instances for cfg in limited]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [run_one(inst, cfg) for inst, cfg in jobs]


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ResultRow.columns())
    for r in rows:
        w.writerow(list(asdict(r).values()))
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ResultRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ResultRow.columns():
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    out = []
    for d in reader:
        out.append(ResultRow(d["instance"], d["config"], d["status"], d["cost"],
                             int(d["nodes"]), int(d["sp_searches"]), int(d["arc_relaxations"]),
                             float(d["time_total_s"]), float(d["time_sp_s"])))
    return out


def geometric_mean(values: Sequence[float], floor: float = 1.0) -> float:
    """Geometric mean with values clamped below at ``floor`` (a
    root-infeasible solve performs zero shortest-path searches)."""
    if not values:
        return math.nan
    return math.exp(sum(math.log(max(v, floor)) for v in values) / len(values))


def nontrivial_instances(rows: Sequence[ResultRow], baseline: str = BASELINE.label,
                         threshold: int = TRIVIAL_NODES) -> set[str]:
    """Instances the baseline needs at least ``threshold`` nodes for."""
    return {r.instance for r in rows if r.config == baseline and r.nodes >= threshold}


def summarize(rows: Sequence[ResultRow], baseline: str | None = BASELINE.label,
              threshold: int = TRIVIAL_NODES) -> list[dict]:
    """Per-configuration geometric means and maxima over the non-trivial
    instances (all instances when the baseline is absent)."""
    keep = None
    if baseline is not None and any(r.config == baseline for r in rows):
        keep = nontrivial_instances(rows, baseline, threshold)
    by_cfg: dict[str, list[ResultRow]] = {}
    for r in rows:
        if keep is None or r.instance in keep:
            by_cfg.setdefault(r.config, []).append(r)
    out = []
    for cfg, rs in by_cfg.items():
        entry = {"config": cfg, "instances": len(rs),
                 "solved": sum(r.status in ("Optimal", "Infeasible") for r in rs)}
        for m in METRICS:
            vals = [getattr(r, m) for r in rs]
            entry[f"gmean_{m}"] = geometric_mean(vals, 1e-6 if m.startswith("time") else 1.0)
            entry[f"max_{m}"] = max(vals)
        out.append(entry)
    return out


def summary_to_csv(summary: Sequence[dict]) -> str:
    if not summary:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(summary[0]), lineterminator="\n")
    w.writeheader()
    for e in summary:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in e.items()})
    return buf.getvalue()


def cdf_rows(rows: Sequence[ResultRow], metric: str = "nodes") -> list[tuple[str, int, float]]:
    """(config, x, fraction of instances solved within x) step points."""
    by_cfg: dict[str, list[ResultRow]] = {}
    for r in rows:
        by_cfg.setdefault(r.config, []).append(r)
    out = []
    for cfg, rs in by_cfg.items():
        solved = sorted(getattr(r, metric) for r in rs if r.status in ("Optimal", "Infeasible"))
        n = len(rs)
        for i, x in enumerate(solved):
            if i + 1 < len(solved) and solved[i + 1] == x:
                continue
            out.append((cfg, x, (i + 1) / n))
    return out


def cdf_to_csv(points, metric: str = "nodes") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["config", metric, "fraction_solved"])
    w.writerows((c, x, f"{f:.6g}") for c, x, f in points)
    return buf.getvalue()


def config_matrix(node_rules: Iterable[str], branch_rules: Iterable[str],
                  conflicts: Iterable[str] = ("standard", "graph"), **common) -> list[SolverConfig]:
    """Cartesian product, skipping strong branching with standard conflicts."""
    out = []
    for ns in node_rules:
        for br in branch_rules:
            for cf in conflicts:
                if br == "strong" and cf != "graph":
                    continue
                out.append(SolverConfig(node_selection=ns, branching=br, conflict=cf, **common))
    return out


# -- seeded suites ------------------------------------------------------------------

ORACLE_PARAMS = GenParams(vertices=25, arcs=60, restrictions=15, clause_size=2, dnf_clauses=4,
                          min_dnf_clauses=2, free_var_rate=0.1, negative_rate=0.85,
                          near_path_bias=0.8, hot_paths=15)
HARD_PARAMS = GenParams(vertices=60, arcs=200, restrictions=200, layers=15, clause_size=1,
                        dnf_clauses=4, min_dnf_clauses=3, negative_rate=1.0, near_path_bias=1.0,
                        hot_paths=300, weight_range=(1, 10))


def seeded_suite(count: int, params: GenParams = ORACLE_PARAMS, first_seed: int = 0) -> list[LcspInstance]:
    return [generate(first_seed + i, params) for i in range(count)]


def hard_suite(count: int, min_nodes: int = 50, params: GenParams = HARD_PARAMS,
               first_seed: int = 0, max_seeds: int = 5000) -> list[LcspInstance]:
    """The first ``count`` seeds whose baseline solve needs ``min_nodes`` nodes."""
    found = []
    for seed in range(first_seed, first_seed + max_seeds):
        inst = generate(seed, params)
        _, st = solve(inst, BASELINE)
        if st.nodes >= min_nodes:
            found.append(inst)
            if len(found) == count:
                break
    return found
