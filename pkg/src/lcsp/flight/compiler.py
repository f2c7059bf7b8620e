"""TFR compilation: flight network + restrictions -> core LCSP instance."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from ..dag import Dag
from ..logic import Definition, compile_dnf_restrictions
from ..solver import LcspInstance
from .model import DEFAULT_AIRCRAFT, DEFAULT_LEVELS, AircraftModel, LevelTable
from .network import Arc3d, ProjectedNetwork, RoutingGraph, Vertex3d, in_ellipse

log = logging.getLogger(__name__)

KINDS = ("vertex", "segment", "departure", "arrival")
WEIGHT_SCALE = 10**9     # integer weight units per kg
# heuristic values are shrunk by this factor so that floating-point error in
# the triangle inequality can never make them inconsistent
HEURISTIC_SLACK = 1e-12


class UnknownAirport(ValueError):
    pass


class EmptySearchSpace(ValueError):
    pass


class TfrLiteral(NamedTuple):
    """A set literal.  ``element`` is a waypoint id for vertex/departure/
    arrival literals and a ``(tail, head)`` pair for segment literals."""

    kind: str
    element: object
    level_min: int | None = None
    level_max: int | None = None
    negated: bool = False

    def validate(self, levels: LevelTable) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown literal kind {self.kind!r}")
        lo, hi = self.level_range(levels)
        if not 1 <= lo <= hi <= len(levels):
            raise ValueError(f"level interval [{lo}, {hi}] outside 1..{len(levels)}")

    def level_range(self, levels: LevelTable) -> tuple[int, int]:
        lo = 1 if self.level_min is None else self.level_min
        hi = len(levels) if self.level_max is None else self.level_max
        return lo, hi

    def waypoints(self) -> tuple[str, ...]:
        return tuple(self.element) if self.kind == "segment" else (self.element,)


@dataclass
class Tfr:
    id: str
    clauses: list[list[TfrLiteral]]


@dataclass
class CompiledInstance:
    instance: LcspInstance
    source: Vertex3d
    target: Vertex3d
    vertices: list[Vertex3d]
    arcs: list[Arc3d]
    aggregates: dict[int, TfrLiteral] = field(default_factory=dict)
    dropped: list[str] = field(default_factory=list)
    graph: RoutingGraph | None = None

    @property
    def heuristic(self):
        return self.instance.heuristic

    def route(self, path) -> list[Vertex3d]:
        if not path.arcs:
            return [self.source]
        return [self.arcs[path.arcs[0]].tail] + [self.arcs[a].head for a in path.arcs]

    def fuel_kg(self, path) -> float:
        return sum(self.arcs[a].fuel_kg for a in path.arcs)

    def duration_s(self, path) -> float:
        return sum(self.arcs[a].duration_s for a in path.arcs)


def _materialize(graph: RoutingGraph, s3d: Vertex3d, t3d: Vertex3d):
    """Forward expansion from s3d, then pruning to vertices reaching t3d."""
    index = {s3d: 0}
    vertices = [s3d]
    arcs: list[Arc3d] = []
    i = 0
    while i < len(vertices):
        v = vertices[i]
        i += 1
        if v == t3d:
            continue
        for arc in graph.expand_neighbors(v):
            if arc.head not in index:
                index[arc.head] = len(vertices)
                vertices.append(arc.head)
            arcs.append(arc)
    if t3d not in index:
        raise EmptySearchSpace(f"no route from {s3d} to {t3d} in the search space")
    preds: dict[Vertex3d, list[Vertex3d]] = {}
    for arc in arcs:
        preds.setdefault(arc.head, []).append(arc.tail)
    useful = {t3d}
    stack = [t3d]
    while stack:
        v = stack.pop()
        for u in preds.get(v, ()):
            if u not in useful:
                useful.add(u)
                stack.append(u)
    vertices = [v for v in vertices if v in useful]
    arcs = [a for a in arcs if a.tail in useful and a.head in useful]
    return vertices, arcs


def literal_arcs(lit: TfrLiteral, arcs: Sequence[Arc3d], s3d: Vertex3d,
                 levels: LevelTable) -> list[int]:
    """Ids of the 3-D arcs whose use makes the literal's element visited."""
    lo, hi = lit.level_range(levels)
    out = []
    if lit.kind == "segment":
        u, v = lit.element
        for a, arc in enumerate(arcs):
            if arc.tail.waypoint == u and arc.head.waypoint == v:
                a_lo, a_hi = sorted((arc.tail.level, arc.head.level))
                if a_lo <= hi and lo <= a_hi:
                    out.append(a)
    elif lit.kind == "vertex":
        wp = lit.element
        if wp == s3d.waypoint:
            for a, arc in enumerate(arcs):
                if arc.tail.waypoint == wp and lo <= arc.tail.level <= hi:
                    out.append(a)
        else:
            for a, arc in enumerate(arcs):
                if arc.head.waypoint == wp and lo <= arc.head.level <= hi:
                    out.append(a)
    else:
        raise ValueError(f"{lit.kind} literals have no arc set")
    return out


def compile_flight(network: ProjectedNetwork, tfrs: Sequence[Tfr], s_airport: str, t_airport: str,
                   levels: LevelTable = DEFAULT_LEVELS, aircraft: AircraftModel = DEFAULT_AIRCRAFT,
                   ellipse_factor: float = 1.2, start_level: int = 1,
                   end_level: int | None = None) -> CompiledInstance:
    for ap in (s_airport, t_airport):
        if ap not in network:
            raise UnknownAirport(f"airport {ap!r} is not a network waypoint")
    end_level = start_level if end_level is None else end_level
    space = in_ellipse(network, s_airport, t_airport, ellipse_factor)
    graph = RoutingGraph(network, t_airport, space, levels, aircraft)
    s3d, t3d = Vertex3d(s_airport, start_level), Vertex3d(t_airport, end_level)
    if s3d == t3d:
        raise EmptySearchSpace("origin equals destination")
    vertices, arcs = _materialize(graph, s3d, t3d)
    space_set = set(space)

    # -- restrictions over set literals, with constants folded --------------
    agg_var: dict[tuple, int] = {}
    agg_lits: dict[int, TfrLiteral] = {}
    agg_arcs: dict[int, list[int]] = {}
    arc_lit_var: dict[int, int] = {}   # arc id -> graph variable
    dnf: list[list[list[int]]] = []
    dropped: list[str] = []
    infeasible = False
    # aggregate variables are numbered after all graph variables, which are
    # only known once every literal is resolved, so collect symbolically first
    symbolic = []
    for tfr in tfrs:
        for clause in tfr.clauses:
            for lit in clause:
                lit.validate(levels)
        touched = any(all(w in space_set for w in lit.waypoints())
                      for clause in tfr.clauses for lit in clause)
        if not touched:
            dropped.append(tfr.id)
            continue
        restriction = []
        satisfied = False
        for clause in tfr.clauses:
            lits = []
            dead = False
            for lit in clause:
                if lit.kind in ("departure", "arrival"):
                    ap = s_airport if lit.kind == "departure" else t_airport
                    truth = (lit.element == ap) != lit.negated
                    if not truth:
                        dead = True
                        break
                    continue
                key = (lit.kind, lit.element, *lit.level_range(levels))
                ids = agg_arcs.get(key)
                if ids is None:
                    ids = agg_arcs[key] = literal_arcs(lit, arcs, s3d, levels)
                if not ids:
                    # element unreachable at these levels: visited is false
                    if not lit.negated:
                        dead = True
                        break
                    continue
                lits.append((key, lit.negated))
                agg_lits.setdefault(key, lit._replace(negated=False))
            keys = {k for k, _ in lits}
            if dead or len(keys) < len(set(lits)):
                continue  # false constant, or a literal together with its negation
            lits = list(dict.fromkeys(lits))
            if not lits:
                satisfied = True
                break
            restriction.append(lits)
        if satisfied:
            continue
        if not restriction:
            log.info("restriction %s is unsatisfiable inside the search space", tfr.id)
            infeasible = True
            continue
        symbolic.append(restriction)

    # graph variables: one per referenced arc, in arc order
    used_arcs = sorted({a for key in agg_lits for a in agg_arcs[key]})
    for x, a in enumerate(used_arcs):
        arc_lit_var[a] = x
    nxt = len(used_arcs)
    definitions = {}
    base_clauses = []
    for key in agg_lits:
        ids = agg_arcs[key]
        if len(ids) == 1:
            agg_var[key] = arc_lit_var[ids[0]]
            continue
        x = agg_var[key] = nxt
        nxt += 1
        members = [arc_lit_var[a] for a in ids]
        definitions[x] = Definition("or", tuple(members))
        base_clauses.append([~x] + members)
        for m in members:
            base_clauses.append([x, ~m])
    for restriction in symbolic:
        dnf.append([[~agg_var[k] if negd else agg_var[k] for k, negd in clause]
                    for clause in restriction])
    if infeasible:
        base_clauses.append([])
    formula, defs = compile_dnf_restrictions(dnf, nxt, graph_vars=range(len(used_arcs)),
                                             definitions=definitions, base_clauses=base_clauses)

    vindex = {v: i for i, v in enumerate(vertices)}
    weights = [math.ceil(arc.fuel_kg * WEIGHT_SCALE) for arc in arcs]
    dag = Dag(len(vertices), [(vindex[a.tail], vindex[a.head], w) for a, w in zip(arcs, weights)],
              vindex[s3d], vindex[t3d], {a: x for a, x in arc_lit_var.items()},
              weight_scale=WEIGHT_SCALE)
    h = [math.floor(graph.heuristic_kg(v) * WEIGHT_SCALE * (1 - HEURISTIC_SLACK)) for v in vertices]
    h[vindex[t3d]] = 0
    name = f"{s_airport}-{t_airport}"
    inst = LcspInstance(dag, formula, defs, h, name)
    aggregates = {agg_var[k]: lit for k, lit in agg_lits.items()}
    return CompiledInstance(inst, s3d, t3d, vertices, arcs, aggregates, dropped, graph)
