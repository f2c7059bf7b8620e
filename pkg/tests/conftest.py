import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from lcsp.dag import Dag
from lcsp.logic import CnfFormula
from lcsp.solver import LcspInstance

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

# vertex ids of the three-vertex example graph
S, V, T = 0, 1, 2
Y, Z = 2, 3


def free_bad_instance() -> LcspInstance:
    """s->v->t costs 2, the direct arc s->t costs 5.  The direct arc is y,
    z is free, and phi = {y or z, y or not z} forces y."""
    dag = Dag(3, [(S, V, 1), (V, T, 1), (S, T, 5)], S, T, {0: 0, 1: 1, 2: Y})
    formula = CnfFormula(4, [[Y, Z], [Y, ~Z]], graph_vars=[0, 1, Y])
    return LcspInstance(dag, formula, {}, None, "free_bad")


@pytest.fixture
def free_bad():
    return free_bad_instance()


# vertex ids of the six-vertex enforcement example; the unique topological
# order is s, v3, v2, v5, v4, t
ES, ET, E2, E3, E4, E5 = 0, 1, 2, 3, 4, 5
ENFORCE_ARCS = [(ES, E3), (ES, E2), (ES, E5), (E3, E4), (E3, E2), (E2, E5), (E2, E4),
                (E5, E4), (E2, ET), (E5, ET), (E4, ET)]


def enforce_dag() -> Dag:
    arcs = [(u, v, 1) for u, v in ENFORCE_ARCS]
    return Dag(6, arcs, ES, ET, {a: a for a in range(len(arcs))})


@pytest.fixture
def enforce_example():
    return enforce_dag()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
