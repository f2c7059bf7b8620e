"""
A three-vertex instance, step by step
=====================================

The cheap route s -> v -> t costs 2 and the direct arc s -> t costs 5.
Variable y stands for the direct arc and z is a free variable.  The formula
{y or z, y or not z} can only be satisfied with y true, so the cheap route
is ruled out even though nothing mentions its arcs.
"""

from lcsp.dag import Dag, shortest_path
from lcsp.logic import CnfFormula, Reason, condition, extract_conflict
from lcsp.solver import LcspInstance, SolverConfig, solve

S, V, T = 0, 1, 2
Y, Z = 2, 3
dag = Dag(3, [(S, V, 1), (V, T, 1), (S, T, 5)], S, T, {0: 0, 1: 1, 2: Y})
formula = CnfFormula(4, [[Y, Z], [Y, ~Z]], graph_vars=[0, 1, Y])

# The unconstrained relaxation picks the cheap route.
root = shortest_path(dag)
print("root relaxation:", root)

# Its arcs induce y = false.  Whatever z does, one clause stays unsatisfied,
# and the variables of those clauses form the conflict to branch on.
state = condition(formula)
state.assign(~Y, Reason.TENTATIVE)
state.assign(Z, Reason.TENTATIVE)
print("conflict:", extract_conflict(state, 0).variables)

# Branching on y: the y = false child dies in unit propagation (z and not z
# are both forced), the y = true child keeps only the direct arc.
for conflict in ("standard", "graph"):
    sol, stats = solve(LcspInstance(dag, formula), SolverConfig(conflict=conflict))
    print(f"{conflict:8s} -> {sol.status}, arcs {sol.path.arcs}, cost {sol.cost}, "
          f"{stats.nodes} nodes, {stats.sp_searches} searches")
