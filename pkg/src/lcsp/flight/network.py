"""Projected airway network and the lazily expanded 3-D routing graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .model import (DEFAULT_AIRCRAFT, DEFAULT_LEVELS, AircraftModel, LevelTable,
                    arc_cost, climb_distance_m, great_circle_km)


class Waypoint(NamedTuple):
    id: str
    lat: float
    lon: float


@dataclass
class ProjectedNetwork:
    waypoints: list[Waypoint]
    segments: list[tuple[str, str]]
    _index: dict[str, int] = field(init=False, repr=False)
    _out: dict[str, list[str]] = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {}
        for i, w in enumerate(self.waypoints):
            if w.id in self._index:
                raise ValueError(f"duplicate waypoint id {w.id!r}")
            if not (-90 <= w.lat <= 90 and -180 <= w.lon <= 180):
                raise ValueError(f"waypoint {w.id!r} has invalid coordinates")
            self._index[w.id] = i
        self._out = {w.id: [] for w in self.waypoints}
        seen = set()
        for u, v in self.segments:
            for x in (u, v):
                if x not in self._index:
                    raise ValueError(f"segment ({u}, {v}) references unknown waypoint {x!r}")
            if (u, v) in seen or u == v:
                continue
            seen.add((u, v))
            self._out[u].append(v)

    def __contains__(self, wp: str) -> bool:
        return wp in self._index

    def position(self, wp: str) -> tuple[float, float]:
        w = self.waypoints[self._index[wp]]
        return (w.lat, w.lon)

    def order(self, wp: str) -> int:
        return self._index[wp]

    def distance_km(self, a: str, b: str) -> float:
        return great_circle_km(self.position(a), self.position(b))

    def out_segments(self, wp: str) -> list[str]:
        return self._out[wp]


class Vertex3d(NamedTuple):
    waypoint: str
    level: int


class Arc3d(NamedTuple):
    tail: Vertex3d
    head: Vertex3d
    fuel_kg: float
    duration_s: float
    distance_km: float


class RoutingGraph:
    """Implicit 3-D graph restricted to a search space and oriented towards
    the destination.

    A segment (u, v) is kept iff gcd(v, t) < gcd(u, t), ties broken by
    waypoint order; this makes the graph acyclic.
    """

    def __init__(self, network: ProjectedNetwork, target: str, allowed=None,
                 levels: LevelTable = DEFAULT_LEVELS, aircraft: AircraftModel = DEFAULT_AIRCRAFT):
        self.network = network
        self.target = target
        self.levels = levels
        self.aircraft = aircraft
        self.allowed = set(allowed) if allowed is not None else None
        self._to_target: dict[str, float] = {}

    def to_target_km(self, wp: str) -> float:
        d = self._to_target.get(wp)
        if d is None:
            d = self._to_target[wp] = self.network.distance_km(wp, self.target)
        return d

    def keeps_segment(self, u: str, v: str) -> bool:
        du, dv = self.to_target_km(u), self.to_target_km(v)
        if dv != du:
            return dv < du
        return self.network.order(v) > self.network.order(u)

    def segments_from(self, u: str) -> list[str]:
        net = self.network
        out = [v for v in net.out_segments(u)
               if (self.allowed is None or v in self.allowed) and self.keeps_segment(u, v)]
        out.sort(key=net.order)
        return out

    def expand_neighbors(self, vertex: Vertex3d) -> list[Arc3d]:
        """Cruise arc first, then climbs and descents by increasing altitude
        change, per kept out-segment."""
        u, level = vertex
        result = []
        n_levels = len(self.levels)
        for v in self.segments_from(u):
            d = self.network.distance_km(u, v)
            fuel, dur = arc_cost(d, level, level, self.levels, self.aircraft)
            result.append(Arc3d(vertex, Vertex3d(v, level), fuel, dur, d))
            ups = range(level + 1, n_levels + 1)
            downs = range(level - 1, 0, -1)
            changes = []
            for seq in (ups, downs):
                for new in seq:
                    # altitude grows monotonically along each sequence
                    if climb_distance_m(self.levels.delta_m(level, new), self.aircraft) > d * 1e3:
                        break
                    changes.append(new)
            changes.sort(key=lambda new: (self.levels.delta_m(level, new), new < level))
            for new in changes:
                cost = arc_cost(d, level, new, self.levels, self.aircraft)
                if cost is not None:
                    result.append(Arc3d(vertex, Vertex3d(v, new), cost[0], cost[1], d))
        return result

    def heuristic_kg(self, vertex: Vertex3d) -> float:
        return self.aircraft.fuel_kg_per_km * self.to_target_km(vertex[0])


def heuristic_kg(network: ProjectedNetwork, vertex: Vertex3d, target: str,
                 aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> float:
    """Fuel lower bound: cruising the great-circle distance at the optimal level."""
    return aircraft.fuel_kg_per_km * network.distance_km(vertex[0], target)


def expand_neighbors(network: ProjectedNetwork, vertex: Vertex3d, target: str,
                     levels: LevelTable = DEFAULT_LEVELS,
                     aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> list[Arc3d]:
    return RoutingGraph(network, target, None, levels, aircraft).expand_neighbors(vertex)


def in_ellipse(network: ProjectedNetwork, s: str, t: str, factor: float = 1.2) -> list[str]:
    """Waypoints v with gcd(s, v) + gcd(v, t) <= factor * gcd(s, t)."""
    direct = network.distance_km(s, t)
    limit = factor * direct
    out = []
    for w in network.waypoints:
        d = network.distance_km(s, w.id) + network.distance_km(w.id, t)
        if d <= limit or math.isclose(d, limit, rel_tol=1e-12):
            out.append(w.id)
    return out
