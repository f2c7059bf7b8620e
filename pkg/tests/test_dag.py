import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import E2, E3, E4, E5, ENFORCE_ARCS, ES, ET, free_bad_instance
from oracles import enumeration_check, random_dag
from lcsp.dag import (Contradiction, CycleDetected, Dag, Infeasible, InducedDag, Path,
                      enforce, path_in_graph, shortest_path, topological_sort)


def arc_id(u, v):
    return ENFORCE_ARCS.index((u, v))


def test_topological_order_of_example(enforce_example):
    assert enforce_example.order == [ES, E3, E2, E5, E4, ET]


def test_topological_single_vertex():
    assert topological_sort(1, []) == [0]


def test_topological_cycle():
    with pytest.raises(CycleDetected):
        topological_sort(2, [(0, 1), (1, 0)])
    with pytest.raises(CycleDetected):
        Dag(2, [(0, 1, 1), (1, 0, 1)], 0, 1)


def test_topological_smallest_id_first():
    assert topological_sort(4, [(3, 1), (2, 1)]) == [0, 2, 3, 1]


def test_dag_validation():
    with pytest.raises(ValueError):
        Dag(2, [(0, 1, -1)], 0, 1)
    with pytest.raises(ValueError):
        Dag(2, [(0, 1, 1), (0, 1, 2)], 0, 1, {0: 5, 1: 5})


def test_enforce_example(enforce_example):
    induced, implied = enforce(enforce_example, [arc_id(E2, E4)])
    deleted = {arc_id(ES, E5), arc_id(E3, E4), arc_id(E2, E5), arc_id(E2, ET)}
    assert set(induced.deleted) == deleted
    assert set(implied) == deleted


def test_enforce_empty_trail(enforce_example):
    induced, implied = enforce(enforce_example, [])
    assert implied == [] and induced.active_arcs() == list(range(len(ENFORCE_ARCS)))


def test_enforce_negative_literal(enforce_example):
    a = arc_id(E5, E4)
    induced, implied = enforce(enforce_example, [~a])
    assert induced.deleted == [a]
    assert implied == []  # the variable itself is assigned


def test_enforce_contradiction(enforce_example):
    # enforcing (v2,v4) deletes the jumping arc (v3,v4), which is set true
    with pytest.raises(Contradiction):
        enforce(enforce_example, [arc_id(E3, E4), arc_id(E2, E4)])
    with pytest.raises(Contradiction):
        enforce(enforce_example, [~arc_id(E2, E4), arc_id(E2, E4)])


def test_enforce_span_guard():
    # 0 -> 1 -> 2 with s=1: the arc (0,1) lies before the source
    dag = Dag(3, [(0, 1, 1), (1, 2, 1)], 1, 2, {0: 0, 1: 1})
    with pytest.raises(Infeasible):
        enforce(dag, [0])


def test_rollback_restores_mask(enforce_example):
    induced = InducedDag(enforce_example)
    n = 12
    value = [0] * n
    trail = [~arc_id(E5, E4)]
    value[arc_id(E5, E4)] = -1
    induced.enforce(trail, value)
    snap = bytes(induced.active)
    trail.append(arc_id(E2, E4))
    value[arc_id(E2, E4)] = 1
    induced.enforce(trail, value)
    assert bytes(induced.active) != snap
    induced.rollback(1)
    assert bytes(induced.active) == snap
    assert induced.enforced == []


def test_shortest_path_free_bad():
    inst = free_bad_instance()
    assert shortest_path(inst.dag) == Path((0, 1), 2)
    induced, _ = enforce(inst.dag, [2])
    assert shortest_path(induced) == Path((2,), 5)


def test_shortest_path_disconnected():
    dag = Dag(3, [(0, 1, 1)], 0, 2)
    assert shortest_path(dag) is None


def test_shortest_path_bound():
    dag = free_bad_instance().dag
    assert shortest_path(dag, bound=2) is None
    assert shortest_path(dag, bound=3) == Path((0, 1), 2)


def test_shortest_path_lexicographic_ties():
    dag = Dag(3, [(0, 2, 2), (0, 1, 1), (1, 2, 1)], 0, 2)
    assert shortest_path(dag).arcs == (0,)
    dag = Dag(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)], 0, 2)
    assert shortest_path(dag).arcs == (0, 1)


def test_path_in_graph():
    dag = free_bad_instance().dag
    assert path_in_graph(Path((0, 1), 2), InducedDag(dag))
    induced, _ = enforce(dag, [~1])
    assert not path_in_graph(Path((0, 1), 2), induced)
    induced, _ = enforce(dag, [2])
    assert path_in_graph(Path((2,), 5), induced)


@pytest.mark.parametrize("seed", range(30))
def test_induced_paths_agree_with_trail(seed):
    assert enumeration_check(random.Random(seed))


@given(st.integers(0, 10**6))
def test_enforcement_monotone(seed):
    rng = random.Random(seed)
    dag = random_dag(rng, rng.randint(2, 10))
    m = dag.num_arcs
    if m == 0:
        return
    chosen = rng.sample(range(m), rng.randint(0, min(5, m)))
    trail = [a if rng.random() < 0.3 else ~a for a in chosen]
    for cut in range(len(trail)):
        try:
            small, _ = enforce(dag, trail[:cut])
            big, _ = enforce(dag, trail)
        except Infeasible:
            return
        assert all(small.active[a] or not big.active[a] for a in range(m))


def test_mutual_enforcement_contradiction():
    # enforcing (1,2) deletes (0,3), which jumps over vertex 1 and is set true
    dag = Dag(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)], 0, 3, {1: 0, 3: 1})
    with pytest.raises(Contradiction):
        enforce(dag, [1, 0])


def _nx_dist(dag, active):
    g = nx.DiGraph()
    g.add_nodes_from(range(dag.num_vertices))
    for a in range(dag.num_arcs):
        if active[a]:
            u, v, w = dag.tails[a], dag.heads[a], dag.weights[a]
            if not g.has_edge(u, v) or g[u][v]["weight"] > w:
                g.add_edge(u, v, weight=w)
    try:
        return nx.shortest_path_length(g, dag.source, dag.target, weight="weight")
    except nx.NetworkXNoPath:
        return None


@pytest.mark.parametrize("seed", range(100))
def test_static_shortest_path_matches_networkx(seed):
    rng = random.Random(seed)
    dag = random_dag(rng, rng.randint(2, 30), density=rng.uniform(0.05, 0.4))
    induced = InducedDag(dag)
    for a in range(dag.num_arcs):
        if rng.random() < 0.2:
            induced.active[a] = 0
    p = shortest_path(induced)
    want = _nx_dist(dag, induced.active)
    if want is None:
        assert p is None
    else:
        assert p.weight == want
        assert dag.is_st_path(p.arcs) and dag.path_weight(p.arcs) == p.weight
        assert all(induced.active[a] for a in p.arcs)
