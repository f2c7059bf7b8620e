"""Great-circle geometry and the simplified aircraft performance model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

EARTH_RADIUS_KM = 6371.0


def great_circle_km(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """Haversine distance between two (lat, lon) points given in degrees."""
    lat1, lon1 = map(math.radians, p1)
    lat2, lon2 = map(math.radians, p2)
    a = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


class LevelTable:
    """Flight levels 1..L with strictly increasing altitudes in meters."""

    def __init__(self, altitudes_m: Sequence[float], optimal_level: int | None = None):
        alts = [float(a) for a in altitudes_m]
        if not alts:
            raise ValueError("level table is empty")
        if any(b <= a for a, b in zip(alts, alts[1:])):
            raise ValueError("level altitudes must be strictly increasing")
        self.altitudes = alts
        self.optimal = len(alts) if optimal_level is None else optimal_level
        if not 1 <= self.optimal <= len(alts):
            raise ValueError(f"optimal level {self.optimal} outside 1..{len(alts)}")

    @classmethod
    def linear(cls, count: int = 181, low_m: float = 1100.0, high_m: float = 11300.0,
               optimal_level: int | None = None) -> "LevelTable":
        if count == 1:
            return cls([high_m], optimal_level)
        step = (high_m - low_m) / (count - 1)
        return cls([low_m + i * step for i in range(count)], optimal_level)

    def __len__(self) -> int:
        return len(self.altitudes)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LevelTable) and self.altitudes == other.altitudes
                and self.optimal == other.optimal)

    def altitude(self, level: int) -> float:
        return self.altitudes[level - 1]

    def delta_m(self, level: int, other: int) -> float:
        return abs(self.altitude(level) - self.altitude(other))

    def levels(self) -> range:
        return range(1, len(self.altitudes) + 1)


@dataclass(frozen=True)
class AircraftModel:
    speed_ms: float = 240.1          # Mach 0.7
    climb_rate_ms: float = 12.7      # 2500 ft/min
    fuel_kg_per_km: float = 6.0      # at the optimal level
    penalty_base: float = 1.01       # per level away from the optimum

    def __post_init__(self):
        if not 0 < self.climb_rate_ms < self.speed_ms:
            raise ValueError("need 0 < climb rate < speed")
        if self.fuel_kg_per_km <= 0:
            raise ValueError("fuel consumption must be positive")

    @property
    def projected_speed_ms(self) -> float:
        return math.sqrt(self.speed_ms ** 2 - self.climb_rate_ms ** 2)


class Allowed(NamedTuple):
    toc_distance_m: float   # ground distance flown while climbing


class Forbidden(NamedTuple):
    required_m: float


DEFAULT_AIRCRAFT = AircraftModel()
DEFAULT_LEVELS = LevelTable.linear()


def cruise_duration_s(d_km: float, aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> float:
    return 1e3 * d_km / aircraft.speed_ms


def level_penalty(exponent: float, aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> float:
    return aircraft.penalty_base ** exponent


def cruise_consumption_kg(d_km: float, level: float, levels: LevelTable = DEFAULT_LEVELS,
                          aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> float:
    """Fuel for cruising ``d_km`` at ``level`` (fractional levels allowed for
    the climb midpoint)."""
    return d_km * aircraft.fuel_kg_per_km * level_penalty(abs(levels.optimal - level), aircraft)


def climb_feasible(d_m: float, level: int, new_level: int, levels: LevelTable = DEFAULT_LEVELS,
                   aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> Allowed | Forbidden:
    """Step climb (or descent) check along a ground distance of ``d_m``."""
    climb_s = levels.delta_m(level, new_level) / aircraft.climb_rate_ms
    toc = aircraft.projected_speed_ms * climb_s
    return Allowed(toc) if toc <= d_m else Forbidden(toc)


def climb_distance_m(delta_m: float, aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> float:
    return aircraft.projected_speed_ms * delta_m / aircraft.climb_rate_ms


def arc_cost(d_km: float, level: int, new_level: int, levels: LevelTable = DEFAULT_LEVELS,
             aircraft: AircraftModel = DEFAULT_AIRCRAFT) -> tuple[float, float] | None:
    """(fuel kg, duration s) for flying a segment of ``d_km`` from ``level``
    to ``new_level``; None when the level change is not flyable."""
    if level == new_level:
        return (cruise_consumption_kg(d_km, level, levels, aircraft),
                cruise_duration_s(d_km, aircraft))
    check = climb_feasible(d_km * 1e3, level, new_level, levels, aircraft)
    if isinstance(check, Forbidden):
        return None
    toc_km = check.toc_distance_m / 1e3
    rest_km = max(0.0, d_km - toc_km)
    duration = levels.delta_m(level, new_level) / aircraft.climb_rate_ms + cruise_duration_s(rest_km, aircraft)
    if new_level > level:
        fuel = (cruise_consumption_kg(toc_km, (level + new_level) / 2, levels, aircraft)
                + cruise_consumption_kg(rest_km, new_level, levels, aircraft))
    else:
        fuel = cruise_consumption_kg(d_km, level, levels, aircraft)
    return fuel, duration
