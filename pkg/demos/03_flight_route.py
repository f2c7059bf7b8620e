"""
Routing a flight around traffic flow restrictions
=================================================

Builds a synthetic airway grid, compiles one origin/destination pair into a
core instance and solves it.  The route is printed as waypoint@level.
"""

import sys

from lcsp.flight import FlightDataset, compile_flight, synthetic_dataset
from lcsp.solver import SolverConfig, solve

if len(sys.argv) > 1:
    ds = FlightDataset.load(sys.argv[1])
else:
    ds = synthetic_dataset(7)
origin, dest = ds.od_pairs[0]
print(f"{len(ds.network.waypoints)} waypoints, {len(ds.tfrs)} restrictions, {len(ds.levels)} levels")

ci = compile_flight(ds.network, ds.tfrs, origin, dest, ds.levels)
inst = ci.instance
print(f"compiled: {inst.dag.num_vertices} vertices, {inst.dag.num_arcs} arcs, "
      f"{inst.formula.num_vars} variables, dropped {ci.dropped or 'none'}")

# Without restrictions the plane would climb straight to the best level.
free = compile_flight(ds.network, [], origin, dest, ds.levels)
sol, _ = solve(free.instance)
print("unrestricted:", " ".join(f"{v.waypoint}@{v.level}" for v in free.route(sol.path)),
      f"{free.fuel_kg(sol.path):.1f} kg")

for cfg in (SolverConfig(), SolverConfig(node_selection="best_first", branching="sup", conflict="graph")):
    sol, st = solve(inst, cfg)
    print(f"{cfg.label}: {sol.status}, {st.nodes} nodes, {st.sp_searches} searches")
    if sol.path is not None:
        print("  route:", " ".join(f"{v.waypoint}@{v.level}" for v in ci.route(sol.path)))
        print(f"  fuel {ci.fuel_kg(sol.path):.1f} kg, {ci.duration_s(sol.path) / 60:.1f} min")
