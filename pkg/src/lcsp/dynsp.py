"""Dynamic one-to-one shortest paths (LPA* with shortest-path-tree repair).

Labels survive across successive induced graphs of one Dag.  Arc deletions
that cut the current shortest path tree invalidate the whole subtree below the
cut; its vertices get their look-ahead recomputed from scratch once, during
``apply_diff``.  Afterwards the main phase only meets overconsistent vertices,
so no in-neighborhood is scanned more than once per update cycle.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence

from .dag import INF, Dag, InducedDag, Path


class LpaStar:
    """LPA* labels over a fixed Dag with a changing active-arc set.

    ``h`` must be admissible and consistent for every subgraph (it is, for any
    heuristic admissible on the full graph, since arcs are only removed
    relative to it).
    """

    def __init__(self, dag: Dag, h: Sequence[float] | None = None,
                 rebuild_fraction: float = 0.25):
        self.dag = dag
        n = dag.num_vertices
        self.h = h if h is not None else [0] * n
        self.rebuild_fraction = rebuild_fraction
        self.active = bytearray([1]) * dag.num_arcs
        self.n_active = dag.num_arcs
        self.deleted: set[int] = set()
        self.scans = [0] * n
        self.relaxations = 0
        self.pops = 0
        self.reopened = 0
        self.rebuilds = 0
        self.underconsistent = 0
        self.popped_keys: list[tuple] | None = None
        self._reset_labels()

    # -- labels ---------------------------------------------------------------
    def _reset_labels(self) -> None:
        n = self.dag.num_vertices
        self.d = [INF] * n
        self.rhs = [INF] * n
        self.par = [-1] * n
        self.tree = [-1] * n
        self.qkey: list[tuple | None] = [None] * n
        self.heap: list[tuple] = []
        s = self.dag.source
        self.rhs[s] = 0
        self._queue(s)

    def key(self, v: int) -> tuple:
        m = min(self.d[v], self.rhs[v])
        return (m + self.h[v], m)

    def _queue(self, v: int) -> None:
        if self.d[v] != self.rhs[v]:
            k = self.key(v)
            if self.qkey[v] != k:
                self.qkey[v] = k
                heapq.heappush(self.heap, (k[0], k[1], v))
        else:
            self.qkey[v] = None

    def queued(self) -> list[int]:
        return sorted(v for v, k in enumerate(self.qkey) if k is not None)

    def _scan_in(self, v: int) -> None:
        """Full recomputation of rhs(v) over the active in-arcs."""
        self.scans[v] += 1
        dag = self.dag
        best, arg = INF, -1
        d, tails, weights, active = self.d, dag.tails, dag.weights, self.active
        for a in dag.in_arcs[v]:
            if active[a]:
                c = d[tails[a]] + weights[a]
                if c < best:
                    best, arg = c, a
        self.rhs[v] = best
        self.par[v] = arg

    # -- updates ----------------------------------------------------------------
    def sync(self, induced: InducedDag) -> None:
        """Bring the labels to the active-arc set of ``induced``."""
        now = set(induced.deleted)
        old = self.deleted
        self.apply_diff(sorted(now - old), sorted(old - now))

    def apply_diff(self, deleted: Iterable[int], inserted: Iterable[int]) -> None:
        dag = self.dag
        deleted = [a for a in deleted if self.active[a]]
        inserted = [a for a in inserted if not self.active[a]]
        self.scans = [0] * dag.num_vertices
        if not deleted and not inserted:
            return
        for a in deleted:
            self.active[a] = 0
            self.deleted.add(a)
        for a in inserted:
            self.active[a] = 1
            self.deleted.discard(a)
        self.n_active += len(inserted) - len(deleted)
        if len(deleted) + len(inserted) > self.rebuild_fraction * max(self.n_active, 1):
            self.rebuilds += 1
            self._reset_labels()
            return

        s = dag.source
        heads, tails, weights, out_arcs = dag.heads, dag.tails, dag.weights, dag.out_arcs
        d, tree, par = self.d, self.tree, self.par

        # subtrees below deleted tree arcs
        stack = [heads[a] for a in deleted if tree[heads[a]] == a and d[heads[a]] < INF]
        subtree: set[int] = set()
        while stack:
            x = stack.pop()
            if x in subtree:
                continue
            subtree.add(x)
            for a in out_arcs[x]:
                y = heads[a]
                if tree[y] == a and y not in subtree:
                    stack.append(y)
        for x in subtree:
            d[x] = INF
            tree[x] = -1

        rescan = set(subtree)
        for a in deleted:
            if par[heads[a]] == a:
                rescan.add(heads[a])
        for x in subtree:
            for a in out_arcs[x]:
                if par[heads[a]] == a:
                    rescan.add(heads[a])
        rescan.discard(s)
        for v in sorted(rescan):
            self._scan_in(v)

        touched = set(rescan)
        rhs = self.rhs
        for a in inserted:
            v = heads[a]
            if v in rescan or v == s:
                continue
            c = d[tails[a]] + weights[a]
            if c < rhs[v]:
                rhs[v] = c
                par[v] = a
            touched.add(v)
        touched |= subtree
        for v in sorted(touched):
            self._queue(v)

    # -- search -----------------------------------------------------------------
    def compute(self, bound=INF) -> Path | None:
        """Shortest s,t-path of the current graph costing less than ``bound``.

        Expansion stops once the target is consistent and every queued key
        exceeds the target's key, or when the smallest key reaches ``bound``.
        Vertices with keys equal to the target's are expanded too, which makes
        the backward extraction canonical (smallest arc id at every step from
        the target) across zero-weight ties.
        """
        dag = self.dag
        t = dag.target
        d, rhs, par, tree, h = self.d, self.rhs, self.par, self.tree, self.h
        heads, weights, out_arcs = dag.heads, dag.weights, dag.out_arcs
        active, qkey, heap = self.active, self.qkey, self.heap
        expanded: set[int] = set()
        record = self.popped_keys
        while heap:
            k1, k2, v = heap[0]
            if qkey[v] != (k1, k2):
                heapq.heappop(heap)
                continue
            if d[t] == rhs[t]:
                mt = d[t]
                if (k1, k2) > (mt + h[t], mt):
                    break
            if k1 >= bound:
                break
            heapq.heappop(heap)
            qkey[v] = None
            self.pops += 1
            if record is not None:
                record.append((k1, k2))
            if d[v] > rhs[v]:
                if v in expanded:
                    self.reopened += 1
                expanded.add(v)
                dv = d[v] = rhs[v]
                tree[v] = par[v]
                for a in out_arcs[v]:
                    if not active[a]:
                        continue
                    self.relaxations += 1
                    y = heads[a]
                    c = dv + weights[a]
                    if c < rhs[y]:
                        rhs[y] = c
                        par[y] = a
                        self._queue(y)
            else:
                # underconsistent: not reached when updates go through
                # apply_diff, kept for arbitrary label states
                self.underconsistent += 1
                d[v] = INF
                tree[v] = -1
                if v != dag.source:
                    self._scan_in(v)
                self._queue(v)
                for a in out_arcs[v]:
                    y = heads[a]
                    if par[y] == a:
                        self._scan_in(y)
                        self._queue(y)
        return self.extract(bound)

    def extract(self, bound=INF) -> Path | None:
        dag = self.dag
        s, t = dag.source, dag.target
        d = self.d
        if d[t] != self.rhs[t] or d[t] >= bound or d[t] == INF:
            return None
        tails, weights, active = dag.tails, dag.weights, self.active
        arcs = []
        v = t
        while v != s:
            dv = d[v]
            for a in dag.in_arcs[v]:
                if active[a] and d[tails[a]] + weights[a] == dv:
                    arcs.append(a)
                    v = tails[a]
                    break
            else:
                raise AssertionError("broken predecessor chain")
        arcs.reverse()
        return Path(tuple(arcs), d[t])


def init(dag: Dag, h: Sequence[float] | None = None, **kw) -> LpaStar:
    return LpaStar(dag, h, **kw)
