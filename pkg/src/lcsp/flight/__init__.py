"""Flight planning with traffic flow restrictions on top of the LCSP solver."""

from .compiler import (CompiledInstance, EmptySearchSpace, Tfr, TfrLiteral, UnknownAirport,
                       compile_flight, literal_arcs)
from .dataset import FlightDataset, parse_tfrs, format_tfrs, synthetic_dataset
from .model import (DEFAULT_AIRCRAFT, DEFAULT_LEVELS, AircraftModel, Allowed, Forbidden, LevelTable, arc_cost, climb_feasible,
                    cruise_consumption_kg, cruise_duration_s, great_circle_km)
from .network import (ProjectedNetwork, RoutingGraph, Vertex3d, Waypoint, expand_neighbors,
                      heuristic_kg, in_ellipse)

compile = compile_flight  # noqa: A001  (name used by the command line and docs)

__all__ = [
    "DEFAULT_AIRCRAFT", "DEFAULT_LEVELS", "AircraftModel", "Allowed", "CompiledInstance", "EmptySearchSpace", "FlightDataset",
    "Forbidden", "LevelTable", "ProjectedNetwork", "RoutingGraph", "Tfr", "TfrLiteral",
    "UnknownAirport", "Vertex3d", "Waypoint", "arc_cost", "climb_feasible", "compile",
    "compile_flight", "cruise_consumption_kg", "cruise_duration_s", "expand_neighbors",
    "format_tfrs", "great_circle_km", "heuristic_kg", "in_ellipse", "literal_arcs",
    "parse_tfrs", "synthetic_dataset",
]
