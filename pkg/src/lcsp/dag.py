"""Weighted DAGs, enforcement of trails into induced subgraphs and static
one-to-one shortest paths."""

from __future__ import annotations

import heapq
from typing import Iterable, NamedTuple, Sequence

INF = float("inf")


class CycleDetected(ValueError):
    pass


class Infeasible(Exception):
    """The induced subproblem admits no s,t-path agreeing with the trail."""


class Contradiction(Infeasible):
    """Enforcement deleted an arc whose variable the trail sets true."""


class Path(NamedTuple):
    arcs: tuple[int, ...]
    weight: int


def topological_sort(num_vertices: int, arcs: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's method with smallest-vertex-id tie-breaking; returns the order."""
    indeg = [0] * num_vertices
    succ: list[list[int]] = [[] for _ in range(num_vertices)]
    for u, v in arcs:
        succ[u].append(v)
        indeg[v] += 1
    heap = [v for v in range(num_vertices) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != num_vertices:
        raise CycleDetected(f"graph has a cycle ({num_vertices - len(order)} vertices on or behind it)")
    return order


class Dag:
    """Immutable weighted DAG with source, target and a partial arc/variable map.

    Arc ids are the indices into ``tails``/``heads``/``weights``.  Weights are
    non-negative integers; ``weight_scale`` records how many integer units make
    one natural unit (1 for plain integer instances).
    """

    def __init__(self, num_vertices: int, arcs: Sequence[tuple[int, int, int]],
                 source: int, target: int, arc_var: dict[int, int] | None = None,
                 weight_scale: int = 1):
        self.num_vertices = n = num_vertices
        self.tails = [a[0] for a in arcs]
        self.heads = [a[1] for a in arcs]
        self.weights = [a[2] for a in arcs]
        for a, (u, v, w) in enumerate(arcs):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc {a} references a missing vertex")
            if w < 0:
                raise ValueError(f"arc {a} has negative weight {w}")
        if not (0 <= source < n and 0 <= target < n):
            raise ValueError("source/target out of range")
        self.source = source
        self.target = target
        self.weight_scale = weight_scale
        self.out_arcs: list[list[int]] = [[] for _ in range(n)]
        self.in_arcs: list[list[int]] = [[] for _ in range(n)]
        for a in range(len(arcs)):
            self.out_arcs[self.tails[a]].append(a)
            self.in_arcs[self.heads[a]].append(a)
        self.order = topological_sort(n, zip(self.tails, self.heads))
        self.rank = [0] * n
        for r, v in enumerate(self.order):
            self.rank[v] = r
        self.arc_var = [-1] * len(arcs)
        self.var_arc: dict[int, int] = {}
        for a, x in (arc_var or {}).items():
            if x in self.var_arc:
                raise ValueError(f"variable {x} mapped to two arcs")
            self.arc_var[a] = x
            self.var_arc[x] = a
        self.from_source = self._reach(source, self.out_arcs, self.heads)
        self.to_target = self._reach(target, self.in_arcs, self.tails)
        self._jumping: dict[int, list[int]] = {}

    @property
    def num_arcs(self) -> int:
        return len(self.tails)

    def _reach(self, start, adj, other) -> list[bool]:
        seen = [False] * self.num_vertices
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for a in adj[u]:
                x = other[a]
                if not seen[x]:
                    seen[x] = True
                    stack.append(x)
        return seen

    def jumping_arcs(self, u: int) -> list[int]:
        """Arcs (i, j) with rank(i) < rank(u) < rank(j)."""
        got = self._jumping.get(u)
        if got is None:
            r = self.rank[u]
            rank, heads = self.rank, self.heads
            got = [a for a, i in enumerate(self.tails)
                   if rank[i] < r < rank[heads[a]]]
            self._jumping[u] = got
        return got

    def arc(self, a: int) -> tuple[int, int, int]:
        return self.tails[a], self.heads[a], self.weights[a]

    def path_weight(self, arcs: Iterable[int]) -> int:
        return sum(self.weights[a] for a in arcs)

    def is_st_path(self, arcs: Sequence[int]) -> bool:
        if not arcs:
            return self.source == self.target
        if self.tails[arcs[0]] != self.source or self.heads[arcs[-1]] != self.target:
            return False
        return all(self.heads[a] == self.tails[b] for a, b in zip(arcs, arcs[1:]))

    def induced_assignment(self, arcs: Iterable[int]) -> list[int]:
        """Literals over all mapped variables induced by a path."""
        on = set(arcs)
        return [x if a in on else ~x
                for a, x in enumerate(self.arc_var) if x >= 0]

    def __repr__(self) -> str:
        return f"Dag(vertices={self.num_vertices}, arcs={self.num_arcs}, s={self.source}, t={self.target})"


class InducedDag:
    """Active-arc view of a Dag under a trail, enforced incrementally.

    ``enforce`` processes trail entries not seen yet; ``rollback(n)`` undoes
    the deletions caused by trail entries at positions ``>= n``.
    """

    def __init__(self, dag: Dag):
        self.dag = dag
        self.active = bytearray([1]) * dag.num_arcs
        self.deleted: list[int] = []
        self.enforced: list[int] = []
        self.upto = 0
        self._journal: list[tuple[int, int, int]] = []

    def enforce(self, trail: Sequence[int], value: Sequence[int]) -> list[int]:
        """Enforce ``trail[self.upto:]``.

        ``value[x]`` is +1/-1/0 for variable ``x``.  Returns the arcs deleted
        in this call whose variable is unassigned.  Raises ``Contradiction``
        if a deleted arc is set true, ``Infeasible`` if an enforced arc lies
        outside the s-t span.
        """
        dag = self.dag
        var_arc = dag.var_arc
        active = self.active
        rank = dag.rank
        rs, rt = rank[dag.source], rank[dag.target]
        implied: list[int] = []
        while self.upto < len(trail):
            pos = self.upto
            lit = trail[pos]
            self.upto = pos + 1
            x = lit if lit >= 0 else ~lit
            a = var_arc.get(x)
            if a is None:
                continue
            self._journal.append((pos, len(self.deleted), len(self.enforced)))
            if lit < 0:
                if active[a]:
                    self._delete(a, value, implied)
                continue
            if not active[a]:
                raise Contradiction(f"enforced arc {a} already deleted")
            u, v = dag.tails[a], dag.heads[a]
            if (rank[u] < rs or rank[v] > rt
                    or not dag.from_source[u] or not dag.to_target[v]):
                raise Infeasible(f"enforced arc {a} lies outside the s-t span")
            self.enforced.append(a)
            for b in dag.out_arcs[u]:
                if b != a and active[b]:
                    self._delete(b, value, implied)
            for b in dag.jumping_arcs(u):
                if active[b]:
                    self._delete(b, value, implied)
        return implied

    def _delete(self, b: int, value, implied: list[int]) -> None:
        self.active[b] = 0
        self.deleted.append(b)
        y = self.dag.arc_var[b]
        if y >= 0:
            val = value[y]
            if val > 0:
                raise Contradiction(f"arc {b} deleted but its variable is true")
            if val == 0:
                implied.append(b)

    def rollback(self, trail_len: int) -> None:
        journal = self._journal
        target_del = None
        target_enf = None
        while journal and journal[-1][0] >= trail_len:
            _, target_del, target_enf = journal.pop()
        if target_del is not None:
            active = self.active
            deleted = self.deleted
            while len(deleted) > target_del:
                active[deleted.pop()] = 1
            del self.enforced[target_enf:]
        if self.upto > trail_len:
            self.upto = trail_len

    def active_arcs(self) -> list[int]:
        return [a for a, on in enumerate(self.active) if on]

    def contains(self, arcs: Iterable[int]) -> bool:
        active = self.active
        return all(active[a] for a in arcs)


def enforce(dag: Dag, trail: Sequence[int]) -> tuple[InducedDag, list[int]]:
    """Fresh induced graph for ``trail``; see ``InducedDag.enforce``."""
    nvars = max([dag.num_arcs] + [(lit if lit >= 0 else ~lit) + 1 for lit in trail]
                + [x + 1 for x in dag.var_arc])
    value = [0] * nvars
    for lit in trail:
        if lit >= 0:
            value[lit] = 1
        else:
            value[~lit] = -1
    induced = InducedDag(dag)
    implied = induced.enforce(list(trail), value)
    return induced, implied


def path_in_graph(path: Path | Sequence[int], induced: InducedDag) -> bool:
    arcs = path.arcs if isinstance(path, Path) else path
    return induced.contains(arcs)


class SearchCounter:
    __slots__ = ("relaxations",)

    def __init__(self):
        self.relaxations = 0


def shortest_path(induced: InducedDag | Dag, h: Sequence[int] | None = None,
                  bound=INF, counter: SearchCounter | None = None) -> Path | None:
    """Minimum-weight s,t-path of the induced graph, or None.

    Paths costing ``>= bound`` are not returned.  Among optimal paths the
    lexicographically smallest arc-id sequence is chosen.  ``h`` (admissible)
    only prunes the forward sweep.
    """
    if isinstance(induced, Dag):
        induced = InducedDag(induced)
    dag = induced.dag
    active = induced.active
    s, t = dag.source, dag.target
    rank = dag.rank
    if rank[s] > rank[t]:
        return None
    span = dag.order[rank[s]:rank[t] + 1]
    heads, weights, out_arcs = dag.heads, dag.weights, dag.out_arcs
    g = {s: 0}
    relax = 0
    for u in span:
        gu = g.get(u)
        if gu is None:
            continue
        if h is not None and gu + h[u] >= bound:
            del g[u]
            continue
        for a in out_arcs[u]:
            if not active[a]:
                continue
            relax += 1
            v = heads[a]
            nd = gu + weights[a]
            old = g.get(v)
            if old is None or nd < old:
                g[v] = nd
    if counter is not None:
        counter.relaxations += relax
    if t not in g or g[t] >= bound:
        return None
    # distances to t restricted to the kept vertices, then greedy by arc id
    dist = {t: 0}
    for u in reversed(span):
        if u == t or u not in g:
            continue
        best = None
        for a in out_arcs[u]:
            if active[a]:
                dv = dist.get(heads[a])
                if dv is not None:
                    c = weights[a] + dv
                    if best is None or c < best:
                        best = c
        if best is not None:
            dist[u] = best
    arcs = []
    u = s
    while u != t:
        du = dist[u]
        for a in out_arcs[u]:
            if active[a]:
                dv = dist.get(heads[a])
                if dv is not None and weights[a] + dv == du:
                    arcs.append(a)
                    u = heads[a]
                    break
    return Path(tuple(arcs), dist[s])
