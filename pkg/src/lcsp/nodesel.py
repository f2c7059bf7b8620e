"""Node queue and node-selection rules for the branch and bound."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .dag import INF, Path

NODE_RULES = ("dfs", "most_feasible", "best_first", "plunging", "projection", "hybrid")


@dataclass(eq=False)
class BnbNode:
    """Subproblem T = parent fixpoint trail + branching literal.

    ``bound`` is the parent's relaxation value (dual bound of the node) and
    ``violations`` the number of clauses the parent's path violated.
    """

    trail: tuple[int, ...]
    reasons: tuple[int, ...]
    branch_lit: int | None = None
    parent_id: int = -1
    bound: float = 0
    violations: int = 0
    depth: int = 0
    parent_path: Path | None = None
    probed: tuple | None = None  # (path or None, bound) from a strong-branching look-ahead
    id: int = -1
    seq: int = -1
    removed: bool = field(default=False, repr=False)


@dataclass
class SelectionContext:
    current: BnbNode | None = None
    incumbent: float = INF
    root_weight: float | None = None
    root_violations: int | None = None


def projection_score(node: BnbNode, ctx: SelectionContext) -> float:
    """w(p_i) + (w(p*) - w(p0)) / v0 * v_i; requires an incumbent."""
    slope = (ctx.incumbent - ctx.root_weight) / ctx.root_violations
    return node.bound + slope * node.violations


class NodeQueue:
    """Open nodes with lazily maintained per-rule indexes."""

    def __init__(self, rule: str = "dfs", plunge_depth: int = 4):
        if rule not in NODE_RULES:
            raise ValueError(f"unknown node selection rule {rule!r}")
        self.rule = rule
        self.plunge_depth = plunge_depth
        self._seq = itertools.count()
        self._ids = itertools.count()
        self._stack: list[BnbNode] = []
        self._by_bound: list[tuple] = []
        self._by_violation: list[tuple] = []
        self._children: dict[int, list[BnbNode]] = {}
        self._alive: dict[int, BnbNode] = {}
        self._plunges = 0

    def __len__(self) -> int:
        return len(self._alive)

    def __bool__(self) -> bool:
        return bool(self._alive)

    def nodes(self) -> list[BnbNode]:
        return list(self._alive.values())

    def min_bound(self) -> float:
        return min((n.bound for n in self._alive.values()), default=INF)

    def push(self, node: BnbNode) -> BnbNode:
        node.seq = next(self._seq)
        if node.id < 0:
            node.id = next(self._ids)
        self._alive[node.id] = node
        self._stack.append(node)
        heapq.heappush(self._by_bound, (node.bound, node.seq, node))
        heapq.heappush(self._by_violation, (node.violations, node.seq, node))
        self._children.setdefault(node.parent_id, []).append(node)
        return node

    def _take(self, node: BnbNode) -> BnbNode:
        node.removed = True
        del self._alive[node.id]
        sibs = self._children.get(node.parent_id)
        if sibs is not None:
            sibs.remove(node)
            if not sibs:
                del self._children[node.parent_id]
        return node

    def _pop_heap(self, heap) -> BnbNode:
        while heap[0][2].removed:
            heapq.heappop(heap)
        return heapq.heappop(heap)[2]

    def select(self, ctx: SelectionContext) -> BnbNode:
        if not self._alive:
            raise IndexError("select from an empty node queue")
        rule = self.rule
        if rule == "dfs":
            stack = self._stack
            while stack[-1].removed:
                stack.pop()
            return self._take(stack.pop())
        if rule == "best_first":
            return self._take(self._pop_heap(self._by_bound))
        if rule == "most_feasible":
            return self._take(self._pop_heap(self._by_violation))
        if rule == "projection":
            return self._take(self._best_projection(ctx))
        if rule == "plunging":
            node = self._plunge(ctx)
            return self._take(node if node is not None else self._pop_heap(self._by_bound))
        # hybrid: bounded plunging, then best-first
        node = self._plunge(ctx) if self._plunges < self.plunge_depth else None
        if node is None:
            self._plunges = 0
            return self._take(self._pop_heap(self._by_bound))
        self._plunges += 1
        return self._take(node)

    def _plunge(self, ctx: SelectionContext) -> BnbNode | None:
        cur = ctx.current
        if cur is None:
            return None
        kids = self._children.get(cur.id)
        if kids:
            return kids[-1]
        sibs = self._children.get(cur.parent_id) if cur.parent_id >= 0 else None
        if sibs:
            return sibs[-1]
        return None

    def _best_projection(self, ctx: SelectionContext) -> BnbNode:
        nodes = self._alive.values()
        if ctx.incumbent == INF or not ctx.root_violations:
            return min(nodes, key=lambda n: (n.violations, n.bound, n.seq))
        return min(nodes, key=lambda n: (projection_score(n, ctx), n.seq))


def select_node(queue: NodeQueue, ctx: SelectionContext) -> BnbNode:
    return queue.select(ctx)
