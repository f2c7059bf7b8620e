"""Branching rules: choose the variable to split on from a conflict."""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

from .dag import INF, Path
from .logic import Conditioning, Conflict, Reason

if TYPE_CHECKING:
    from .solver import BranchAndBound

BRANCH_RULES = ("clause", "moms", "sup", "dup", "cvds", "strong")


def product_score(up: float, down: float, eps: float) -> float:
    return max(eps, up) * max(eps, down)


def best_by_score(candidates: Sequence[int], scores: Sequence[float]) -> int:
    """Highest score, ties to the smallest variable id."""
    best_v, best_s = None, None
    for v, s in zip(candidates, scores):
        if best_s is None or s > best_s or (s == best_s and v < best_v):
            best_v, best_s = v, s
    return best_v


def clause_rule(conflict: Conflict) -> int:
    """First literal of the smallest violated clause (the conflict is
    already ordered that way)."""
    return conflict.variables[0]


def moms_rule(state: Conditioning, candidates: Sequence[int]) -> int:
    """Most occurrences in the minimum-size remaining clauses that contain a
    candidate."""
    cand = set(candidates)
    formula = state.formula
    sat, free = state.sat_count, state.free_count
    clause_ids = set()
    for v in cand:
        clause_ids.update(formula.pos_occ[v])
        clause_ids.update(formula.neg_occ[v])
    live = [ci for ci in clause_ids if not sat[ci]]
    counts = dict.fromkeys(candidates, 0)
    if live:
        smallest = min(free[ci] for ci in live)
        value = state.value
        for ci in live:
            if free[ci] != smallest:
                continue
            for lit in formula.clauses[ci]:
                v = lit if lit >= 0 else ~lit
                if v in cand and value[v] == 0:
                    counts[v] += 1
    return best_by_score(list(counts), list(counts.values()))


def shallow_up_gain(state: Conditioning, lit: int) -> float:
    """Number of unit propagations caused by ``lit``; INF on contradiction."""
    m = state.mark()
    state.assign(lit, Reason.DECISION)
    ok = state.propagate()
    gain = state.mark() - m - 1
    state.rollback(m)
    return gain if ok else INF


def cap(x: float, limit: float) -> float:
    return limit if x == INF or x > limit else x


class Cvds:
    """Conflict variables decaying sum scores."""

    def __init__(self, formula, bump: float = 1.0, decay: float = 0.95, interval: int = 256):
        self.scores = [float(formula.occurrences(v)) for v in range(formula.num_vars)]
        self.bump_by = bump
        self.decay = decay
        self.interval = interval
        self.events = 0

    def update(self, variables) -> None:
        scores = self.scores
        for v in set(variables):
            scores[v] += self.bump_by
        self.events += 1
        if self.interval and self.events % self.interval == 0:
            d = self.decay
            for i in range(len(scores)):
                scores[i] *= d

    def empty_clause(self, trail: Sequence[int]) -> None:
        self.update(lit if lit >= 0 else ~lit for lit in trail)

    def path_conflict(self, trail: Sequence[int], conflict: Sequence[int]) -> None:
        vs = [lit if lit >= 0 else ~lit for lit in trail]
        vs.extend(conflict)
        self.update(vs)

    def choose(self, candidates: Sequence[int]) -> int:
        return best_by_score(candidates, [self.scores[v] for v in candidates])


def cvds_update(cvds: Cvds, event: str, trail: Sequence[int], conflict: Sequence[int] = ()) -> None:
    if event == "empty-clause":
        cvds.empty_clause(trail)
    elif event == "path-conflict":
        cvds.path_conflict(trail, conflict)
    else:
        raise ValueError(f"unknown CVDS event {event!r}")


def choose_branch_variable(bnb: "BranchAndBound", conflict: Conflict, path: Path) -> int:
    """Pick the branching variable from ``conflict`` at the current fixpoint."""
    cfg = bnb.config
    rule = cfg.branching
    cands = conflict.variables
    if rule == "clause":
        return clause_rule(conflict)
    if rule == "moms":
        return moms_rule(bnb.cond, cands)
    if rule == "cvds":
        return bnb.cvds.choose(cands)
    if rule == "sup":
        scores = []
        for v in cands:
            up = cap(shallow_up_gain(bnb.cond, v), cfg.gamma_cap_props)
            down = cap(shallow_up_gain(bnb.cond, ~v), cfg.gamma_cap_props)
            scores.append(product_score(up, down, cfg.epsilon))
        return best_by_score(cands, scores)
    if rule == "dup":
        scores = []
        for v in cands:
            up = cap(bnb.deep_gain(v), cfg.gamma_cap_props)
            down = cap(bnb.deep_gain(~v), cfg.gamma_cap_props)
            scores.append(product_score(up, down, cfg.epsilon))
        return best_by_score(cands, scores)
    if rule == "strong":
        return strong_branching(bnb, cands, path)
    raise ValueError(f"unknown branching rule {rule!r}")


def strong_branching(bnb: "BranchAndBound", cands: Sequence[int], path: Path) -> int:
    """Product-rule strong branching with a working limit: stop once
    ``lookahead * (1 - xi)`` evaluations passed without improving the best
    score, ``xi`` being the fraction of candidates not yet evaluated."""
    cfg = bnb.config
    limit = cfg.gamma_cap_weight * bnb.instance.dag.weight_scale
    best_v, best_s = None, None
    since = 0
    n = len(cands)
    for i, v in enumerate(cands):
        up = cap(bnb.child_cost(v, path) - path.weight, limit)
        down = cap(bnb.child_cost(~v, path) - path.weight, limit)
        s = product_score(up, down, cfg.epsilon)
        if best_s is None or s > best_s or (s == best_s and v < best_v):
            if best_s is None or s > best_s:
                since = 0
            else:
                since += 1
            best_v, best_s = v, s
        else:
            since += 1
        xi = (n - i - 1) / n
        if since >= cfg.lookahead * (1 - xi):
            break
    return best_v
