"""Brute-force reference solver.

Deliberately shares nothing with the search code beyond the instance data
types: paths come from plain DFS enumeration and clauses are evaluated
directly, with free variables enumerated exhaustively.
"""

from __future__ import annotations

import itertools

from .dag import Path
from .solver import LcspInstance, Solution

MAX_PATHS = 10**6
MAX_FREE_ASSIGNMENTS = 2**20


class TooLarge(Exception):
    """Enumeration guard exceeded."""


def all_paths(dag, limit: int = MAX_PATHS) -> list[Path]:
    """Every s,t-path, sorted by (weight, arc ids)."""
    out_arcs = [[] for _ in range(dag.num_vertices)]
    for a, u in enumerate(dag.tails):
        out_arcs[u].append(a)
    found = []
    stack = [(dag.source, [])]
    while stack:
        v, arcs = stack.pop()
        if v == dag.target:
            found.append(arcs)
            if len(found) > limit:
                raise TooLarge(f"more than {limit} s,t-paths")
            continue
        for a in out_arcs[v]:
            stack.append((dag.heads[a], arcs + [a]))
    paths = [Path(tuple(p), sum(dag.weights[a] for a in p)) for p in found]
    paths.sort(key=lambda p: (p.weight, p.arcs))
    return paths


def _free_satisfiable(clauses, limit):
    """Exhaustive check of residual clauses over their (free) variables,
    split into independent components.  Returns a model dict or None."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for clause in clauses:
        vs = [l if l >= 0 else ~l for l in clause]
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, list] = {}
    for clause in clauses:
        if not clause:
            return None
        groups.setdefault(find(clause[0] if clause[0] >= 0 else ~clause[0]), []).append(clause)
    model = {}
    for root, cl in groups.items():
        vs = sorted({l if l >= 0 else ~l for c in cl for l in c})
        if 2 ** len(vs) > limit:
            raise TooLarge(f"{len(vs)} free variables in one component")
        for bits in itertools.product((False, True), repeat=len(vs)):
            val = dict(zip(vs, bits))
            if all(any(val[l] if l >= 0 else not val[~l] for l in c) for c in cl):
                model.update(val)
                break
        else:
            return None
    return model


def check_path(instance: LcspInstance, path: Path, limit: int = MAX_FREE_ASSIGNMENTS):
    """Model of the formula extending the path's arc assignment, or None."""
    dag, formula = instance.dag, instance.formula
    on = set(path.arcs)
    fixed = {}
    for x, a in dag.var_arc.items():
        fixed[x] = a in on
    residual = []
    for clause in formula.clauses:
        rest = []
        sat = False
        for l in clause:
            v = l if l >= 0 else ~l
            if v in fixed:
                if fixed[v] == (l >= 0):
                    sat = True
                    break
            else:
                rest.append(l)
        if sat:
            continue
        if not rest:
            return None
        residual.append(rest)
    model = _free_satisfiable(residual, limit)
    if model is None:
        return None
    full = dict(fixed)
    full.update(model)
    return [v if full.get(v, False) else ~v for v in range(formula.num_vars)]


def brute_force_solve(instance: LcspInstance, max_paths: int = MAX_PATHS,
                      max_free: int = MAX_FREE_ASSIGNMENTS) -> Solution:
    for p in all_paths(instance.dag, max_paths):
        witness = check_path(instance, p, max_free)
        if witness is not None:
            return Solution("Optimal", p, p.weight, witness)
    return Solution("Infeasible")
