"""Branch and bound for the logic-constrained shortest path problem."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import branching
from .branching import BRANCH_RULES, Cvds
from .dag import INF, Dag, InducedDag, Infeasible, Path, SearchCounter, shortest_path
from .dynsp import LpaStar
from .logic import ClauseVarMap, CnfFormula, Conditioning, Reason, extract_conflict
from .nodesel import NODE_RULES, BnbNode, NodeQueue, SelectionContext

log = logging.getLogger(__name__)

OUTCOMES = ("pruned", "logic_infeasible", "graph_infeasible", "incumbent", "branched")


@dataclass
class LcspInstance:
    """DAG + CNF + arc/variable map (held by the Dag) + optional definitions
    of free variables and an optional admissible heuristic per vertex."""

    dag: Dag
    formula: CnfFormula
    definitions: ClauseVarMap = field(default_factory=dict)
    heuristic: Sequence[float] | None = None
    name: str = ""

    def __post_init__(self):
        for x in self.dag.var_arc:
            if x >= self.formula.num_vars:
                raise ValueError(f"mapped variable {x} not in formula")
        for v in self.formula.graph_vars:
            if v not in self.dag.var_arc:
                raise ValueError(f"graph variable {v} has no arc")


@dataclass
class SolverConfig:
    node_selection: str = "dfs"
    branching: str = "clause"
    conflict: str = "standard"
    epsilon: float = 1e-6
    lookahead: int = 8
    cvds_bump: float = 1.0
    cvds_decay: float = 0.95
    cvds_interval: int = 256
    pure_literals: bool = False
    node_limit: int | None = None
    time_limit: float | None = None
    sp_engine: str = "lpa"
    parent_check: bool = True
    plunge_depth: int = 4
    gamma_cap_weight: float = 1e9
    gamma_cap_props: float = 1e6
    rebuild_fraction: float = 0.25
    record_paths: bool = False

    def __post_init__(self):
        if self.node_selection not in NODE_RULES:
            raise ValueError(f"unknown node selection rule {self.node_selection!r}")
        if self.branching not in BRANCH_RULES:
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.conflict not in ("standard", "graph"):
            raise ValueError(f"unknown conflict flavor {self.conflict!r}")
        if self.branching == "strong" and self.conflict != "graph":
            raise ValueError("strong branching requires graph conflicts")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.lookahead < 1:
            raise ValueError("lookahead must be >= 1")
        if not 0 < self.cvds_decay < 1:
            raise ValueError("cvds_decay must lie in (0, 1)")
        if self.sp_engine not in ("lpa", "static"):
            raise ValueError(f"unknown shortest path engine {self.sp_engine!r}")

    @property
    def label(self) -> str:
        return f"{self.node_selection}+{self.branching}+{self.conflict}"


@dataclass
class SolveStats:
    nodes: int = 0
    sp_searches: int = 0
    sp_reused: int = 0
    arc_relaxations: int = 0
    time_total: float = 0.0
    time_sp: float = 0.0
    incumbent_history: list = field(default_factory=list)
    outcomes: dict = field(default_factory=lambda: dict.fromkeys(OUTCOMES, 0))
    paths: list = field(default_factory=list)
    max_depth: int = 0


@dataclass
class Solution:
    status: str
    path: Path | None = None
    cost: float = INF
    witness: list[int] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "Optimal"


class BranchAndBound:
    """One solve.  Holds the conditioned formula, the induced graph and the
    shortest-path engine, all rolled back and forth between nodes."""

    def __init__(self, instance: LcspInstance, config: SolverConfig | None = None):
        self.instance = instance
        self.config = config = config or SolverConfig()
        self.dag = instance.dag
        self.cond = Conditioning(instance.formula)
        self.induced = InducedDag(instance.dag)
        self.stats = SolveStats()
        self.cvds = Cvds(instance.formula, config.cvds_bump, config.cvds_decay,
                         config.cvds_interval)
        self.lpa = (LpaStar(instance.dag, instance.heuristic, config.rebuild_fraction)
                    if config.sp_engine == "lpa" else None)
        self._counter = SearchCounter()
        self.incumbent: Path | None = None
        self.witness: list[int] | None = None
        self.ctx = SelectionContext()
        self.queue = NodeQueue(config.node_selection, config.plunge_depth)
        self._probes: dict[int, tuple] = {}

    # -- state management ------------------------------------------------------
    def rollback(self, mark: int) -> None:
        self.cond.rollback(mark)
        self.induced.rollback(mark)

    def restore(self, trail: Sequence[int], reasons: Sequence[int]) -> None:
        cur = self.cond.trail
        k = 0
        n = min(len(cur), len(trail))
        while k < n and cur[k] == trail[k]:
            k += 1
        self.rollback(k)
        assign = self.cond.assign
        value = self.cond.value
        for i in range(k, len(trail)):
            lit = trail[i]
            if value[lit if lit >= 0 else ~lit]:
                continue
            assign(lit, reasons[i])

    def fixpoint(self) -> str | None:
        """Propagation and enforcement until neither adds literals.

        Returns None at a fixpoint, ``"logic"`` on an empty clause and
        ``"graph"`` on an enforcement contradiction or span violation."""
        cond, induced = self.cond, self.induced
        arc_var = self.dag.arc_var
        while True:
            if not cond.propagate():
                return "logic"
            if self.config.pure_literals:
                cond.pure_literals()
            try:
                implied = induced.enforce(cond.trail, cond.value)
            except Infeasible:
                return "graph"
            if not implied:
                return None
            for a in implied:
                cond.assign(~arc_var[a], Reason.ENFORCEMENT)

    def search(self, bound=INF) -> Path | None:
        st = self.stats
        st.sp_searches += 1
        t0 = time.perf_counter()
        if self.lpa is not None:
            before = self.lpa.relaxations
            self.lpa.sync(self.induced)
            p = self.lpa.compute(bound)
            st.arc_relaxations += self.lpa.relaxations - before
        else:
            c = self._counter
            before = c.relaxations
            p = shortest_path(self.induced, self.instance.heuristic, bound, c)
            st.arc_relaxations += c.relaxations - before
        st.time_sp += time.perf_counter() - t0
        return p

    # -- look-ahead helpers for branching rules ------------------------------------
    def deep_gain(self, lit: int) -> float:
        m = self.cond.mark()
        self.cond.assign(lit, Reason.DECISION)
        res = self.fixpoint()
        gain = self.cond.mark() - m - 1
        self.rollback(m)
        return INF if res is not None else gain

    def child_cost(self, lit: int, path: Path) -> float:
        m = self.cond.mark()
        self.cond.assign(lit, Reason.DECISION)
        if self.fixpoint() is not None:
            cost = INF
        elif self.config.parent_check and self.induced.contains(path.arcs):
            cost = path.weight
        else:
            bound = self._bound()
            p = self.search(bound)
            cost = INF if p is None else p.weight
            self._probes[lit] = (p, bound)
        self.rollback(m)
        return cost

    def _bound(self):
        return INF if self.incumbent is None else self.incumbent.weight

    # -- path check ------------------------------------------------------------------
    def check_path(self, path: Path) -> tuple[bool, object]:
        """Tentatively assign the path's literals and complete free variables.

        Returns ``(True, witness)`` or ``(False, conflict)``; the trail is
        restored either way."""
        cond = self.cond
        mark = cond.mark()
        value = cond.value
        on = set(path.arcs)
        for a, x in enumerate(self.dag.arc_var):
            if x >= 0 and not value[x]:
                cond.assign(x if a in on else ~x, Reason.TENTATIVE)
        cond.complete(self.instance.definitions)
        if cond.is_satisfied or (not cond.has_empty_clause and self._free_search()):
            witness = [v if value[v] > 0 else ~v for v in range(len(value))]
            cond.rollback(mark)
            return True, witness
        conflict = extract_conflict(cond, mark, self.config.conflict,
                                    self.instance.definitions)
        if not conflict.variables:
            conflict = extract_conflict(cond, mark, "standard")
        cond.rollback(mark)
        return False, conflict

    def _free_search(self) -> bool:
        cond = self.cond
        value = cond.value
        clauses = cond.formula.clauses
        for ci, s in enumerate(cond.sat_count):
            if s == 0 and any(value[lit if lit >= 0 else ~lit] == 0 for lit in clauses[ci]):
                return cond.solve()
        return False

    # -- main loop ----------------------------------------------------------------------
    def run(self) -> tuple[Solution, SolveStats]:
        cfg, st, queue, ctx = self.config, self.stats, self.queue, self.ctx
        t_start = time.perf_counter()
        queue.push(BnbNode(trail=(), reasons=(), bound=-INF, depth=0))
        limited = False
        while queue:
            if cfg.node_limit is not None and st.nodes >= cfg.node_limit:
                limited = True
                break
            if cfg.time_limit is not None and time.perf_counter() - t_start > cfg.time_limit:
                limited = True
                break
            node = queue.select(ctx)
            ctx.current = node
            st.nodes += 1
            st.max_depth = max(st.max_depth, node.depth)
            outcome = self.process(node)
            st.outcomes[outcome] += 1
        st.time_total = time.perf_counter() - t_start
        if self.incumbent is not None:
            status = "LimitReached" if limited else "Optimal"
            sol = Solution(status, self.incumbent, self.incumbent.weight, self.witness)
        else:
            sol = Solution("LimitReached" if limited else "Infeasible")
        return sol, st

    def process(self, node: BnbNode) -> str:
        bound = self._bound()
        if node.bound >= bound:
            return "pruned"
        self.restore(node.trail, node.reasons)
        res = self.fixpoint()
        if res is not None:
            if res == "logic" and self.config.branching == "cvds":
                self.cvds.empty_clause(self.cond.trail)
            return "logic_infeasible" if res == "logic" else "graph_infeasible"
        pp = node.parent_path
        if self.config.parent_check and pp is not None and self.induced.contains(pp.arcs):
            p = pp
            self.stats.sp_reused += 1
        else:
            if node.probed is not None:
                # the look-ahead already searched this exact subproblem
                p, probe_bound = node.probed
                self.stats.sp_reused += 1
                if p is None:
                    return "graph_infeasible" if probe_bound == INF else "pruned"
            else:
                p = self.search(bound)
            if self.config.record_paths and p is not None:
                self.stats.paths.append(p.arcs)
        if p is None:
            return "graph_infeasible" if bound == INF else "pruned"
        if p.weight >= bound:
            return "pruned"
        ok, info = self.check_path(p)
        if ok:
            self.incumbent = p
            self.witness = info
            self.ctx.incumbent = p.weight
            self.stats.incumbent_history.append((self.stats.nodes, p.weight))
            return "incumbent"
        conflict = info
        violations = len(conflict.violated)
        if node.depth == 0:
            self.ctx.root_weight = p.weight
            self.ctx.root_violations = violations
        if self.config.branching == "cvds":
            self.cvds.path_conflict(self.cond.trail, conflict.variables)
        self._probes.clear()
        x = branching.choose_branch_variable(self, conflict, p)
        trail = tuple(self.cond.trail)
        reasons = tuple(self.cond.reasons)
        for lit in (~x, x):  # up-branch pushed last
            self.queue.push(BnbNode(trail=trail + (lit,), reasons=reasons + (Reason.DECISION,),
                                    branch_lit=lit, parent_id=node.id, bound=p.weight,
                                    violations=violations, depth=node.depth + 1,
                                    parent_path=p, probed=self._probes.get(lit)))
        return "branched"


def solve(instance: LcspInstance, config: SolverConfig | None = None) -> tuple[Solution, SolveStats]:
    return BranchAndBound(instance, config).run()
