"""Seeded random LCSP instances: layered DAG + random DNF restrictions."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .dag import INF, Dag
from .logic import compile_dnf_restrictions
from .solver import LcspInstance


@dataclass
class GenParams:
    vertices: int = 25
    arcs: int = 60
    restrictions: int = 10
    clause_size: int = 2        # max literals per DNF clause
    dnf_clauses: int = 3        # max DNF clauses per restriction
    min_dnf_clauses: int = 1
    free_var_rate: float = 0.0  # chance a DNF literal is a plain free variable
    weight_range: tuple[int, int] = (1, 20)
    layers: int = 0             # 0: about vertices / 3
    near_path_bias: float = 0.0  # chance to draw literals from short paths
    negative_rate: float = 0.7   # chance a DNF literal is negated
    hot_paths: int = 4           # reweighted shortest paths feeding near_path_bias
    per_path_focus: bool = True  # one restriction targets one hot path (else: all hot arcs)

    def __post_init__(self):
        if self.vertices < 2 or self.arcs < 1:
            raise ValueError("need at least 2 vertices and 1 arc")
        if (self.restrictions < 0 or self.clause_size < 1
                or not 1 <= self.min_dnf_clauses <= self.dnf_clauses):
            raise ValueError("restriction parameters must be positive")


def layered_dag(rng: random.Random, p: GenParams) -> Dag:
    n = p.vertices
    n_layers = p.layers or max(3, n // 3)
    n_layers = min(n_layers, n)
    # s alone in the first layer, t alone in the last one
    inner = list(range(1, n - 1))
    layer_of = {0: 0, n - 1: n_layers - 1}
    mids = list(range(1, n_layers - 1)) or [0]
    for i, v in enumerate(inner):
        layer_of[v] = mids[i % len(mids)] if i < len(mids) else rng.choice(mids)
    by_layer: dict[int, list[int]] = {}
    for v, l in layer_of.items():
        by_layer.setdefault(l, []).append(v)
    lo, hi = p.weight_range
    arcs: dict[tuple[int, int], int] = {}

    def add(u, v):
        if (u, v) not in arcs and layer_of[u] < layer_of[v]:
            arcs[(u, v)] = rng.randint(lo, hi)

    # every vertex gets a predecessor in an earlier layer and a successor in a
    # later one, so each lies on some s,t-path
    for v in sorted(inner, key=lambda x: layer_of[x]):
        earlier = [u for u in layer_of if layer_of[u] < layer_of[v]]
        later = [u for u in layer_of if layer_of[u] > layer_of[v]]
        close_e = [u for u in earlier if layer_of[u] == layer_of[v] - 1] or earlier
        close_l = [u for u in later if layer_of[u] == layer_of[v] + 1] or later
        add(rng.choice(close_e), v)
        add(v, rng.choice(close_l))
    if not inner:
        add(0, n - 1)
    tries = 0
    while len(arcs) < p.arcs and tries < 50 * p.arcs:
        tries += 1
        u = rng.randrange(n)
        lu = layer_of[u]
        if lu == n_layers - 1:
            continue
        span = 1 if rng.random() < 0.7 else rng.randint(1, n_layers - 1 - lu)
        cands = [v for v in by_layer.get(lu + span, [])]
        if not cands:
            continue
        add(u, rng.choice(cands))
    arc_list = [(u, v, w) for (u, v), w in sorted(arcs.items())]
    return Dag(n, arc_list, 0, n - 1, {a: a for a in range(len(arc_list))})


def _short_paths(rng: random.Random, dag: Dag, k: int = 4) -> list[tuple[int, ...]]:
    """Arc sets of a few near-optimal paths (random reweighting)."""
    found = []
    seen = set()
    n = dag.num_vertices
    for _ in range(k):
        noisy = [w * rng.randint(1, 3) for w in dag.weights]
        dist = [INF] * n
        pred = [-1] * n
        dist[dag.source] = 0
        for u in dag.order:
            if dist[u] == INF:
                continue
            for a in dag.out_arcs[u]:
                v = dag.heads[a]
                if dist[u] + noisy[a] < dist[v]:
                    dist[v] = dist[u] + noisy[a]
                    pred[v] = a
        if dist[dag.target] == INF:
            continue
        arcs = []
        v = dag.target
        while v != dag.source:
            arcs.append(pred[v])
            v = dag.tails[pred[v]]
        path = tuple(reversed(arcs))
        if path not in seen:
            seen.add(path)
            found.append(path)
    return found


def generate(seed: int, params: GenParams | None = None) -> LcspInstance:
    p = params or GenParams()
    rng = random.Random(seed)
    dag = layered_dag(rng, p)
    m = dag.num_arcs
    hot = _short_paths(rng, dag, p.hot_paths) if p.near_path_bias > 0 else []
    focus: tuple[int, ...] = ()
    hot_arcs = tuple(sorted({a for path in hot for a in path}))
    n_free_plain = 0
    restrictions = []

    def pick_var():
        nonlocal n_free_plain
        if p.free_var_rate and rng.random() < p.free_var_rate:
            n_free_plain += 1
            return ("free", n_free_plain - 1)
        if focus and rng.random() < p.near_path_bias:
            return ("arc", rng.choice(focus))
        return ("arc", rng.randrange(m))

    for _ in range(p.restrictions):
        r = rng.randint(p.min_dnf_clauses, p.dnf_clauses)
        # literals of one restriction target the same near-optimal path
        if hot:
            focus = rng.choice(hot) if p.per_path_focus else hot_arcs
        restriction = []
        for _ in range(r):
            k = rng.randint(1, p.clause_size)
            lits = {}
            for _ in range(k):
                kind, idx = pick_var()
                lits[(kind, idx)] = rng.random() >= p.negative_rate
            restriction.append(list(lits.items()))
        restrictions.append(restriction)
    # plain free variables follow the arc variables, Tseitin variables follow those
    def lit(kind_idx, pol):
        kind, idx = kind_idx
        v = idx if kind == "arc" else m + idx
        return v if pol else ~v

    dnf = [[[lit(ki, pol) for ki, pol in clause] for clause in restriction]
           for restriction in restrictions]
    formula, defs = compile_dnf_restrictions(dnf, m + n_free_plain, graph_vars=range(m))
    return LcspInstance(dag, formula, defs, name=f"gen-{seed}")
