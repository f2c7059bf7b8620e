"""Propositional core: CNF formulas, incremental conditioning and propagation.

Variables are dense integers ``0..n-1``.  A literal is the variable index for
the positive polarity and its bitwise complement (``~v == -v - 1``) for the
negative one, so negation is ``~lit`` and is its own inverse.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

log = logging.getLogger(__name__)


def var_of(lit: int) -> int:
    return lit if lit >= 0 else ~lit


def neg(lit: int) -> int:
    return ~lit


def make_lit(var: int, polarity: bool = True) -> int:
    return var if polarity else ~var


def lit_str(lit: int) -> str:
    return f"x{lit}" if lit >= 0 else f"~x{~lit}"


class Kind(enum.Enum):
    GRAPH = "graph"
    FREE = "free"


class Reason(enum.IntEnum):
    DECISION = 0
    UNIT = 1
    PURE = 2
    ENFORCEMENT = 3
    TENTATIVE = 4


class Definition(NamedTuple):
    """A free variable defined as the AND (Tseitin clause variable) or the OR
    (set aggregate) of other literals."""

    op: str
    literals: tuple[int, ...]


ClauseVarMap = dict  # var -> Definition, insertion order is evaluation order


class CnfFormula:
    """Clause database with a per-polarity occurrence index.

    Duplicate literals inside a clause are merged, tautological clauses are
    dropped with a warning, duplicate clauses are kept.
    """

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]] = (),
                 graph_vars: Iterable[int] = ()):
        self.num_vars = num_vars
        self.kinds = [Kind.FREE] * num_vars
        for v in graph_vars:
            self.kinds[v] = Kind.GRAPH
        self.clauses: list[tuple[int, ...]] = []
        self.pos_occ: list[list[int]] = [[] for _ in range(num_vars)]
        self.neg_occ: list[list[int]] = [[] for _ in range(num_vars)]
        for clause in clauses:
            self.add_clause(clause)

    def add_clause(self, literals: Iterable[int]) -> int | None:
        lits = tuple(dict.fromkeys(literals))
        seen = set(lits)
        for lit in lits:
            v = var_of(lit)
            if not 0 <= v < self.num_vars:
                raise ValueError(f"literal {lit_str(lit)} out of range")
            if ~lit in seen:
                log.warning("dropping tautological clause %s",
                            [lit_str(x) for x in lits])
                return None
        idx = len(self.clauses)
        self.clauses.append(lits)
        for lit in lits:
            if lit >= 0:
                self.pos_occ[lit].append(idx)
            else:
                self.neg_occ[~lit].append(idx)
        return idx

    def is_graph(self, v: int) -> bool:
        return self.kinds[v] is Kind.GRAPH

    @property
    def graph_vars(self) -> list[int]:
        return [v for v, k in enumerate(self.kinds) if k is Kind.GRAPH]

    @property
    def free_vars(self) -> list[int]:
        return [v for v, k in enumerate(self.kinds) if k is Kind.FREE]

    def occurrences(self, v: int) -> int:
        return len(self.pos_occ[v]) + len(self.neg_occ[v])

    def __len__(self) -> int:
        return len(self.clauses)

    def __repr__(self) -> str:
        return f"CnfFormula(vars={self.num_vars}, clauses={len(self.clauses)})"


class Conditioning:
    """The formula conditioned on a trail, maintained incrementally.

    Per clause it tracks the number of unassigned literals and the number of
    true literals; a clause is satisfied when the latter is positive and is
    the empty clause of the conditioned formula when both are zero.  The trail
    is a stack, ``rollback(mark)`` undoes assignments exactly.

    ``pending`` holds every clause that may currently be unit (stale entries
    are skipped), which keeps unit detection correct across rollbacks.
    """

    def __init__(self, formula: CnfFormula):
        self.formula = formula
        n = formula.num_vars
        self.value = [0] * n
        self.pos = [-1] * n
        self.trail: list[int] = []
        self.reasons: list[Reason] = []
        self.free_count = [len(c) for c in formula.clauses]
        self.sat_count = [0] * len(formula.clauses)
        self.n_satisfied = 0
        self.n_falsified = sum(1 for c in formula.clauses if not c)
        self.pending = deque(i for i, c in enumerate(formula.clauses) if len(c) == 1)

    # -- trail -----------------------------------------------------------
    def lit_value(self, lit: int) -> int:
        if lit >= 0:
            return self.value[lit]
        return -self.value[~lit]

    def is_assigned(self, v: int) -> bool:
        return self.value[v] != 0

    def mark(self) -> int:
        return len(self.trail)

    def assign(self, lit: int, reason: Reason = Reason.DECISION) -> None:
        if lit >= 0:
            v, sat_list, shrink_list, val = lit, self.formula.pos_occ[lit], self.formula.neg_occ[lit], 1
        else:
            v = ~lit
            sat_list, shrink_list, val = self.formula.neg_occ[v], self.formula.pos_occ[v], -1
        if self.value[v]:
            raise ValueError(f"variable {v} already assigned")
        self.value[v] = val
        self.pos[v] = len(self.trail)
        self.trail.append(lit)
        self.reasons.append(reason)
        sat = self.sat_count
        free = self.free_count
        for ci in sat_list:
            free[ci] -= 1
            if sat[ci] == 0:
                self.n_satisfied += 1
            sat[ci] += 1
        pending = self.pending
        for ci in shrink_list:
            f = free[ci] - 1
            free[ci] = f
            if sat[ci] == 0:
                if f == 1:
                    pending.append(ci)
                elif f == 0:
                    self.n_falsified += 1

    def rollback(self, mark: int) -> None:
        trail = self.trail
        sat = self.sat_count
        free = self.free_count
        pending = self.pending
        pos_occ, neg_occ = self.formula.pos_occ, self.formula.neg_occ
        while len(trail) > mark:
            lit = trail.pop()
            self.reasons.pop()
            if lit >= 0:
                v, sat_list, shrink_list = lit, pos_occ[lit], neg_occ[lit]
            else:
                v = ~lit
                sat_list, shrink_list = neg_occ[v], pos_occ[v]
            self.value[v] = 0
            self.pos[v] = -1
            for ci in shrink_list:
                f = free[ci]
                free[ci] = f + 1
                if sat[ci] == 0:
                    if f == 0:
                        self.n_falsified -= 1
                        pending.append(ci)
            for ci in sat_list:
                free[ci] += 1
                s = sat[ci] - 1
                sat[ci] = s
                if s == 0:
                    self.n_satisfied -= 1
                    if free[ci] == 1:
                        pending.append(ci)

    def literals(self, start: int = 0) -> list[int]:
        return self.trail[start:]

    # -- conditioned formula queries ---------------------------------------
    @property
    def has_empty_clause(self) -> bool:
        return self.n_falsified > 0

    @property
    def is_satisfied(self) -> bool:
        return self.n_satisfied == len(self.formula.clauses)

    def remaining_clauses(self) -> list[tuple[int, ...]]:
        """Materialize the conditioned formula (unsatisfied clauses with
        falsified literals removed), in clause index order."""
        out = []
        val = self.lit_value
        for ci, clause in enumerate(self.formula.clauses):
            if self.sat_count[ci]:
                continue
            out.append(tuple(lit for lit in clause if val(lit) == 0))
        return out

    def remaining_indices(self) -> list[int]:
        return [ci for ci, s in enumerate(self.sat_count) if s == 0]

    # -- propagation --------------------------------------------------------
    def propagate(self) -> bool:
        """Unit propagation to fixpoint.  Returns False when the empty clause
        is derived; the trail then holds the literals assigned so far."""
        if self.n_falsified:
            return False
        clauses = self.formula.clauses
        free, sat, value = self.free_count, self.sat_count, self.value
        pending = self.pending
        while pending:
            ci = pending.popleft()
            if sat[ci] or free[ci] != 1:
                continue
            for lit in clauses[ci]:
                if value[lit if lit >= 0 else ~lit] == 0:
                    break
            self.assign(lit, Reason.UNIT)
            if self.n_falsified:
                return False
        return True

    def pure_literals(self, scope: Iterable[int] | None = None) -> int:
        """Assign free variables occurring in a single polarity among the
        remaining clauses; repeats until no pure literal is left.  Graph
        variables are never touched.  Returns the number of literals added."""
        formula = self.formula
        if scope is None:
            scope = formula.free_vars
        scope = [v for v in scope if formula.kinds[v] is Kind.FREE]
        sat = self.sat_count
        added = 0
        changed = True
        while changed:
            changed = False
            for v in scope:
                if self.value[v]:
                    continue
                has_pos = any(sat[ci] == 0 for ci in formula.pos_occ[v])
                has_neg = any(sat[ci] == 0 for ci in formula.neg_occ[v])
                if has_pos != has_neg:
                    self.assign(v if has_pos else ~v, Reason.PURE)
                    added += 1
                    changed = True
        return added

    # -- tentative assignments --------------------------------------------
    def complete(self, definitions: ClauseVarMap) -> int:
        """Assign every unassigned defined variable whose defining literals
        are all assigned to the value of its AND/OR.  Definitions are
        evaluated in insertion order."""
        added = 0
        val = self.lit_value
        for v, (op, lits) in definitions.items():
            if self.value[v]:
                continue
            vals = [val(lit) for lit in lits]
            if 0 in vals:
                continue
            if op == "and":
                truth = all(x > 0 for x in vals)
            else:
                truth = any(x > 0 for x in vals)
            self.assign(v if truth else ~v, Reason.TENTATIVE)
            added += 1
        return added

    def solve(self, node_limit: int = 1_000_000) -> bool:
        """DPLL over the unassigned variables of the remaining clauses.

        On success the satisfying extension is left on the trail; on failure
        the trail is restored."""
        base = self.mark()
        stack: list[tuple[int, int | None]] = []
        ok = self.propagate()
        budget = node_limit
        while True:
            if ok:
                if self.is_satisfied:
                    return True
                lit = self._pick_branch_literal()
                budget -= 1
                if budget < 0:
                    self.rollback(base)
                    raise RuntimeError("DPLL node limit exceeded")
                stack.append((self.mark(), lit))
                self.assign(lit, Reason.DECISION)
                ok = self.propagate()
                continue
            while stack:
                m, lit = stack.pop()
                self.rollback(m)
                if lit is not None:
                    stack.append((m, None))
                    self.assign(~lit, Reason.DECISION)
                    ok = self.propagate()
                    break
            else:
                self.rollback(base)
                return False

    def _pick_branch_literal(self) -> int:
        sat, value = self.sat_count, self.value
        for ci, clause in enumerate(self.formula.clauses):
            if sat[ci]:
                continue
            for lit in clause:
                if value[lit if lit >= 0 else ~lit] == 0:
                    return lit
        raise AssertionError("unsatisfied clause without unassigned literal")


def condition(formula: CnfFormula, trail: Sequence[int] = ()) -> Conditioning:
    """Build the conditioned formula for ``trail`` (assigned as decisions)."""
    state = Conditioning(formula)
    for lit in trail:
        state.assign(lit, Reason.DECISION)
    return state


def unit_propagate(state: Conditioning) -> bool:
    return state.propagate()


def pure_literal_eliminate(state: Conditioning, scope: Iterable[int] | None = None) -> int:
    return state.pure_literals(scope)


def complete_and_check(state: Conditioning, tentative: Iterable[int],
                       definitions: ClauseVarMap) -> list[int] | None:
    """Assign ``tentative`` (literals already on the trail are skipped),
    evaluate the defined variables, and search the leftover free variables.

    Returns the completed trail as a literal list when the formula is then
    satisfied, else None.  The state is restored in both cases."""
    mark = state.mark()
    value = state.value
    try:
        for lit in tentative:
            if not value[lit if lit >= 0 else ~lit]:
                state.assign(lit, Reason.TENTATIVE)
        state.complete(definitions)
        if state.has_empty_clause:
            return None
        if not state.is_satisfied and not state.solve():
            return None
        return list(state.trail)
    finally:
        state.rollback(mark)


# -- Tseitin compilation ----------------------------------------------------

def compile_dnf_restrictions(restrictions: Sequence[Sequence[Sequence[int]]],
                             num_vars: int,
                             graph_vars: Iterable[int] = (),
                             definitions: ClauseVarMap | None = None,
                             base_clauses: Iterable[Iterable[int]] = ()):
    """Compile a conjunction of DNF restrictions into an equisatisfiable CNF.

    Each restriction is a list of DNF clauses, each a list of literals over
    variables ``< num_vars``.  A restriction with ``r`` clauses gets fresh
    variables ``C_1..C_r``; the output holds ``{C_1..C_r}``,
    ``{C_i, ~l_i1, ..., ~l_ik}`` and ``{~C_i, l_ij}`` for every ``i, j``.
    Returns ``(formula, definitions)`` where ``definitions`` maps each ``C_i``
    to the AND of its DNF clause (appended to ``definitions`` if given).
    """
    defs: ClauseVarMap = dict(definitions) if definitions else {}
    formula = CnfFormula(num_vars + sum(len(r) for r in restrictions), (), graph_vars)
    for clause in base_clauses:
        formula.add_clause(clause)
    nxt = num_vars
    for restriction in restrictions:
        lits_per_clause = [tuple(c) for c in restriction]
        if any(not lits for lits in lits_per_clause):
            raise ValueError("empty DNF clause in restriction")
        fresh = list(range(nxt, nxt + len(lits_per_clause)))
        nxt += len(lits_per_clause)
        formula.add_clause(fresh)
        for c, lits in zip(fresh, lits_per_clause):
            formula.add_clause([c] + [~lit for lit in lits])
            for lit in lits:
                formula.add_clause([~c, lit])
            defs[c] = Definition("and", lits)
    return formula, defs


# -- conflicts ----------------------------------------------------------------

@dataclass
class Conflict:
    variables: tuple[int, ...]
    flavor: str = "standard"
    violated: tuple[int, ...] = field(default=())

    def __contains__(self, v: int) -> bool:
        return v in self.variables

    def __len__(self) -> int:
        return len(self.variables)

    def __iter__(self):
        return iter(self.variables)


def violated_clauses(state: Conditioning, mark_t: int) -> list[int]:
    """Clauses of the formula conditioned on the first ``mark_t`` trail
    entries that the full current trail does not satisfy, ordered by their
    size under that prefix, then by index."""
    pos, value = state.pos, state.value
    clauses = state.formula.clauses
    out = []
    for ci, s in enumerate(state.sat_count):
        if s:
            continue
        clause = clauses[ci]
        size = 0
        for lit in clause:
            v = lit if lit >= 0 else ~lit
            if value[v] == 0 or pos[v] >= mark_t:
                size += 1
        out.append((size, ci))
    out.sort()
    return [ci for _, ci in out]


def extract_conflict(state: Conditioning, mark_t: int, flavor: str = "standard",
                     definitions: ClauseVarMap | None = None) -> Conflict:
    """Variables unassigned in the prefix trail (``mark_t`` entries) that
    occur in clauses left unsatisfied by the current (tentative) trail.

    The graph flavor replaces each AND-defined free variable (a compiled DNF
    clause) by the variables of its literals, recursively, and keeps graph
    variables and OR-defined set aggregates.
    Variables are ordered by the violated clause (smallest first) and their
    position inside it.
    """
    violated = violated_clauses(state, mark_t)
    if not violated:
        raise ValueError("conflict requested for a satisfied formula")
    pos, value = state.pos, state.value
    clauses = state.formula.clauses
    order: dict[int, None] = {}
    for ci in violated:
        for lit in clauses[ci]:
            v = lit if lit >= 0 else ~lit
            if value[v] == 0 or pos[v] >= mark_t:
                order.setdefault(v, None)
    std = tuple(order)
    if flavor == "standard":
        return Conflict(std, "standard", tuple(violated))
    if flavor != "graph":
        raise ValueError(f"unknown conflict flavor {flavor!r}")
    defs = definitions or {}
    kinds = state.formula.kinds
    graph: dict[int, None] = {}

    def expand(v: int, seen: set) -> None:
        if kinds[v] is Kind.GRAPH:
            if value[v] == 0 or pos[v] >= mark_t:
                graph.setdefault(v, None)
            return
        d = defs.get(v)
        if d is None or v in seen:
            return
        if d.op == "or":
            # set aggregates stand for a visited element and are kept whole
            if value[v] == 0 or pos[v] >= mark_t:
                graph.setdefault(v, None)
            return
        seen.add(v)
        for lit in d.literals:
            expand(lit if lit >= 0 else ~lit, seen)

    for v in std:
        expand(v, set())
    return Conflict(tuple(graph), "graph", tuple(violated))
