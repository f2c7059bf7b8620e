import math
import random

import pytest

from conftest import DATA
from lcsp.dag import topological_sort
from lcsp.flight import (DEFAULT_AIRCRAFT, DEFAULT_LEVELS, Allowed, EmptySearchSpace, FlightDataset,
                         Forbidden, LevelTable, ProjectedNetwork, RoutingGraph, Tfr, TfrLiteral,
                         UnknownAirport, Vertex3d, Waypoint, arc_cost, climb_feasible, compile_flight,
                         cruise_consumption_kg, cruise_duration_s, expand_neighbors, great_circle_km,
                         heuristic_kg, literal_arcs, synthetic_dataset)
from lcsp.io import ParseError
from lcsp.logic import Reason, condition
from lcsp.oracle import brute_force_solve
from lcsp.solver import BranchAndBound, SolverConfig, solve

STAR = DEFAULT_LEVELS.optimal
V_PROJ = math.sqrt(240.1 ** 2 - 12.7 ** 2)
KM_PER_DEG = math.pi * 6371.0 / 180


# -- geometry and aircraft model ------------------------------------------------------

def test_great_circle():
    assert great_circle_km((10.0, 20.0), (10.0, 20.0)) == 0
    assert great_circle_km((0, 0), (0, 180)) == pytest.approx(math.pi * 6371.0, rel=1e-12)
    assert great_circle_km((0, 0), (0, 90)) == pytest.approx(10007.543, abs=1e-3)


def test_default_levels():
    assert len(DEFAULT_LEVELS) == 181
    assert DEFAULT_LEVELS.altitude(1) == 1100 and DEFAULT_LEVELS.altitude(181) == 11300
    assert STAR == 181


def test_level_table_validation():
    with pytest.raises(ValueError):
        LevelTable([100, 100])
    with pytest.raises(ValueError):
        LevelTable([100, 200], optimal_level=3)


def test_cruise_duration():
    assert cruise_duration_s(240.1) == pytest.approx(1000.0, rel=1e-12)
    assert cruise_duration_s(0) == 0
    assert cruise_duration_s(120.05) == pytest.approx(500.0, rel=1e-12)


def test_cruise_consumption():
    assert cruise_consumption_kg(100, STAR) == pytest.approx(600.0, rel=1e-12)
    assert cruise_consumption_kg(100, STAR - 10) == pytest.approx(600 * 1.01 ** 10, rel=1e-12)
    assert cruise_consumption_kg(100, STAR - 10) == pytest.approx(662.77, abs=5e-3)
    assert cruise_consumption_kg(0, 7) == 0


TWO = LevelTable([0.0, 305.0])


def test_climb_feasible_305():
    d_climb = V_PROJ * 305 / 12.7
    assert 305 / 12.7 == pytest.approx(24.0157, abs=1e-4)
    assert V_PROJ == pytest.approx(239.764, abs=1e-3)
    # 239.764 * 24.0157 = 5758.1
    assert d_climb == pytest.approx(5758.1, abs=0.05)
    res = climb_feasible(d_climb, 1, 2, TWO)
    assert isinstance(res, Allowed)
    assert res.toc_distance_m == pytest.approx(d_climb, rel=1e-12)
    assert isinstance(climb_feasible(d_climb - 1, 1, 2, TWO), Forbidden)


def test_climb_forbidden_3050():
    res = climb_feasible(10000, 1, 2, LevelTable([0.0, 3050.0]))
    assert isinstance(res, Forbidden)
    assert res.required_m == pytest.approx(V_PROJ * 3050 / 12.7, rel=1e-12)


def test_arc_cost_cruise():
    fuel, dur = arc_cost(100, STAR, STAR)
    assert fuel == pytest.approx(600.0)
    assert dur == pytest.approx(416.49, abs=5e-3)


def test_arc_cost_descent_cruises_at_source_level():
    levels = LevelTable.linear(181, 1100, 11300)
    fuel, _ = arc_cost(100, STAR - 10, STAR - 11, levels)
    assert fuel == pytest.approx(600 * 1.01 ** 10, rel=1e-12)


def test_arc_cost_pure_climb():
    d_km = V_PROJ * 305 / 12.7 / 1e3
    fuel, dur = arc_cost(d_km, 1, 2, TWO)
    # all of it flown at the mid level exponent |2 - 1.5|, no cruise remainder
    assert fuel == pytest.approx(d_km * 6 * 1.01 ** 0.5, rel=1e-12)
    assert dur == pytest.approx(305 / 12.7, rel=1e-12)


def test_arc_cost_forbidden():
    assert arc_cost(1.0, 1, 2, LevelTable([0.0, 3050.0])) is None


def test_step_climb_composition():
    levels = LevelTable([0.0, 305.0, 610.0])
    d_km = 50.0
    toc = V_PROJ * 305 / 12.7 / 1e3
    fuel, dur = arc_cost(d_km, 1, 2, levels)
    want = toc * 6 * 1.01 ** 1.5 + (d_km - toc) * 6 * 1.01 ** 1
    assert fuel == pytest.approx(want, rel=1e-12)
    assert dur == pytest.approx(305 / 12.7 + (d_km - toc) * 1e3 / 240.1, rel=1e-12)


# -- neighbor expansion ---------------------------------------------------------------

def line_network(lon_b=1.0):
    wps = [Waypoint("A", 0.0, 0.0), Waypoint("B", 0.0, lon_b), Waypoint("T", 0.0, 2 * lon_b),
           Waypoint("X", 10.0, 10.0)]
    return ProjectedNetwork(wps, [("A", "B"), ("B", "T"), ("B", "A")])


def test_expand_isolated():
    assert expand_neighbors(line_network(), Vertex3d("X", 1), "T") == []


def test_expand_three_arcs():
    levels = LevelTable([1000.0, 1300.0, 1600.0])
    arcs = expand_neighbors(line_network(), Vertex3d("A", 2), "T", levels)
    assert [a.head for a in arcs] == [Vertex3d("B", 2), Vertex3d("B", 3), Vertex3d("B", 1)]
    assert all(a.fuel_kg > 0 for a in arcs)


def test_expand_short_segment_cruise_only():
    levels = LevelTable([1000.0, 1300.0, 1600.0])
    arcs = expand_neighbors(line_network(0.01), Vertex3d("A", 2), "T", levels)
    assert [a.head for a in arcs] == [Vertex3d("B", 2)]


def test_dagification_drops_backward_segment():
    g = RoutingGraph(line_network(), "T")
    assert g.segments_from("B") == ["T"]  # B->A moves away from T


def test_heuristic():
    net = ProjectedNetwork([Waypoint("T", 0.0, 0.0), Waypoint("P", 100 / KM_PER_DEG, 0.0)], [])
    assert heuristic_kg(net, Vertex3d("T", 5), "T") == 0
    assert heuristic_kg(net, Vertex3d("P", 5), "T") == pytest.approx(600.0, rel=1e-9)


# -- compilation ------------------------------------------------------------------------

def tri_network():
    wps = [Waypoint("S", 0.0, 0.0), Waypoint("M", 0.0, 1.0), Waypoint("T", 0.0, 2.0),
           Waypoint("FAR", 30.0, 1.0), Waypoint("FAR2", 31.0, 1.0)]
    return ProjectedNetwork(wps, [("S", "M"), ("M", "T"), ("FAR", "FAR2")])


LEV3 = LevelTable([1000.0, 1300.0, 1600.0])


def test_unknown_airport():
    with pytest.raises(UnknownAirport):
        compile_flight(tri_network(), [], "S", "NOPE", LEV3)


def test_empty_search_space():
    with pytest.raises(EmptySearchSpace):
        compile_flight(tri_network(), [], "S", "FAR", LEV3)


def test_tfr_outside_ellipse_dropped():
    far = Tfr("far", [[TfrLiteral("vertex", "FAR", negated=True)],
                      [TfrLiteral("segment", ("FAR", "FAR2"))]])
    ci = compile_flight(tri_network(), [far], "S", "T", LEV3)
    assert ci.dropped == ["far"]
    assert ci.instance.formula.clauses == []


def test_departure_literal_folds():
    # departure from S holds, so the first clause reduces to the vertex literal
    tfr = Tfr("dep", [[TfrLiteral("departure", "S"), TfrLiteral("vertex", "M", 1, 1, negated=True)]])
    ci = compile_flight(tri_network(), [tfr], "S", "T", LEV3)
    assert not ci.dropped
    agg = {lit.element: x for x, lit in ci.aggregates.items()}
    assert set(agg) == {"M"}
    sol, _ = solve(ci.instance)
    assert sol.status == "Optimal"
    assert all(v.level != 1 for v in ci.route(sol.path) if v.waypoint == "M")


def test_departure_literal_false_kills_clause():
    # departing from M is false: the only clause dies, the TFR is unsatisfiable
    tfr = Tfr("dep", [[TfrLiteral("departure", "M")]])
    ci = compile_flight(tri_network(), [tfr], "S", "T", LEV3)
    assert solve(ci.instance)[0].status == "Infeasible"


def test_negated_departure_true_satisfies_nothing_else():
    tfr = Tfr("arr", [[TfrLiteral("arrival", "T", negated=True)], [TfrLiteral("arrival", "T")]])
    ci = compile_flight(tri_network(), [tfr], "S", "T", LEV3)
    assert ci.instance.formula.clauses == []


def test_vertex_aggregate_arc_set():
    net = tri_network()
    tfr = Tfr("v", [[TfrLiteral("vertex", "M", 2, 3, negated=True)]])
    ci = compile_flight(net, [tfr], "S", "T", LEV3)
    ids = literal_arcs(TfrLiteral("vertex", "M", 2, 3), ci.arcs, ci.source, LEV3)
    want = [a for a, arc in enumerate(ci.arcs) if arc.head.waypoint == "M" and arc.head.level in (2, 3)]
    assert ids == want and ids
    # at the source the outgoing arcs count
    src = literal_arcs(TfrLiteral("vertex", "S", 1, 1), ci.arcs, ci.source, LEV3)
    assert src == [a for a, arc in enumerate(ci.arcs) if arc.tail == Vertex3d("S", 1)]
    sol, _ = solve(ci.instance)
    assert [v for v in ci.route(sol.path) if v.waypoint == "M"] == [Vertex3d("M", 1)]


def test_graph_vars_only_for_referenced_arcs():
    tfr = Tfr("seg", [[TfrLiteral("segment", ("S", "M"), 1, 1, negated=True)]])
    ci = compile_flight(tri_network(), [tfr], "S", "T", LEV3)
    mapped = [a for a, x in enumerate(ci.instance.dag.arc_var) if x >= 0]
    assert mapped == literal_arcs(TfrLiteral("segment", ("S", "M"), 1, 1), ci.arcs, ci.source, LEV3)
    assert len(mapped) < len(ci.arcs)


def fixtures():
    out = []
    for name in ("flight_tiny", "flight_small"):
        ds = FlightDataset.load(DATA / name)
        for o, d in ds.od_pairs:
            out.append(compile_flight(ds.network, ds.tfrs, o, d, ds.levels))
    return out


@pytest.fixture(scope="module")
def compiled():
    return fixtures()


def test_compiled_acyclic_and_positive(compiled):
    for ci in compiled:
        dag = ci.instance.dag
        topological_sort(dag.num_vertices, zip(dag.tails, dag.heads))
        assert all(w > 0 for w in dag.weights)
        assert all(a.fuel_kg > 0 for a in ci.arcs)


def test_per_arc_admissibility(compiled):
    f = DEFAULT_AIRCRAFT.fuel_kg_per_km
    for ci in compiled:
        net = ci.graph.network
        for arc in ci.arcs:
            assert arc.fuel_kg >= f * net.distance_km(arc.tail.waypoint, arc.head.waypoint)
        h = ci.instance.heuristic
        dag = ci.instance.dag
        for a in range(dag.num_arcs):
            assert h[dag.tails[a]] <= dag.weights[a] + h[dag.heads[a]]


def test_no_reopenings_with_heuristic(compiled):
    for ci in compiled:
        for cfg in (SolverConfig(), SolverConfig(node_selection="best_first", branching="sup",
                                                 conflict="graph")):
            bnb = BranchAndBound(ci.instance, cfg)
            bnb.run()
            assert bnb.lpa.reopened == 0 and bnb.lpa.underconsistent == 0


def test_aggregate_soundness(compiled):
    rng = random.Random(0)
    for ci in compiled:
        inst = ci.instance
        dag = inst.dag
        for _ in range(20):
            # random s,t walk
            path, u = [], dag.source
            while u != dag.target:
                outs = [a for a in dag.out_arcs[u] if dag.to_target[dag.heads[a]]]
                a = rng.choice(outs)
                path.append(a)
                u = dag.heads[a]
            on = set(path)
            state = condition(inst.formula)
            for a, x in enumerate(dag.arc_var):
                if x >= 0:
                    state.assign(x if a in on else ~x, Reason.TENTATIVE)
            state.complete(inst.definitions)
            for x, lit in ci.aggregates.items():
                hit = bool(on & set(literal_arcs(lit, ci.arcs, ci.source, ci.graph.levels)))
                assert (state.value[x] > 0) == hit


@pytest.mark.parametrize("seed", range(8))
def test_flight_matches_oracle(seed):
    ds = synthetic_dataset(seed, rows=3, cols=5, n_levels=3, n_tfrs=5, spacing_deg=1.5)
    o, d = ds.od_pairs[0]
    ci = compile_flight(ds.network, ds.tfrs, o, d, ds.levels)
    want = brute_force_solve(ci.instance)
    for cfg in (SolverConfig(), SolverConfig(node_selection="best_first", branching="sup",
                                             conflict="graph"),
                SolverConfig(branching="strong", conflict="graph")):
        sol, _ = solve(ci.instance, cfg)
        assert sol.status == want.status and sol.cost == want.cost


# -- dataset files ---------------------------------------------------------------------

@pytest.mark.parametrize("name", ["flight_tiny", "flight_small"])
def test_dataset_round_trip(name):
    ds = FlightDataset.load(DATA / name)
    texts = {p.name: p.read_text() for p in (DATA / name).iterdir()}
    assert ds.format() == texts


def test_synthetic_deterministic():
    assert synthetic_dataset(3).format() == synthetic_dataset(3).format()


def test_parse_tfr_literals():
    base = {"waypoints.csv": "id,lat,lon\nA,0,0\nB,0,1\n", "segments.csv": "tail,head\nA,B\n",
            "levels.csv": "level,alt_m\n1,1000\n2,2000\n", "od_pairs.csv": "origin,destination\nA,B\n"}
    ds = FlightDataset.parse({**base, "tfrs.txt": "R: vertex:A:1-2:neg segment:A>B | departure:A\n"})
    (tfr,) = ds.tfrs
    assert tfr.clauses[0] == [TfrLiteral("vertex", "A", 1, 2, True), TfrLiteral("segment", ("A", "B"))]
    assert tfr.clauses[1] == [TfrLiteral("departure", "A")]
    for bad in ("R: vertex:A:2-1", "R: road:A", "R: vertex:A:1-9", "R: segment:AB", "R: vertex:Q",
                "R vertex:A", "R: vertex:A |"):
        with pytest.raises(ParseError):
            FlightDataset.parse({**base, "tfrs.txt": bad + "\n"})
    with pytest.raises(ParseError):
        FlightDataset.parse({**base, "levels.csv": "level,alt_m\n1,1000\n3,2000\n"})
    with pytest.raises(ParseError):
        FlightDataset.parse({**base, "waypoints.csv": "id,lat,lon\nA,0,x\n"})
