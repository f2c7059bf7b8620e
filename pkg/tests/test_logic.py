import itertools
import random

import pytest
from hypothesis import given, strategies as st

from oracles import dnf_satisfiable, random_restrictions
from lcsp.logic import (CnfFormula, Definition, Kind, Reason, complete_and_check,
                        compile_dnf_restrictions, condition, extract_conflict, pure_literal_eliminate,
                        unit_propagate, var_of)

A, B, C, D = 0, 1, 2, 3


def remaining(state):
    return sorted(tuple(sorted(c)) for c in state.remaining_clauses())


# -- conditioning ---------------------------------------------------------------

def test_conditioning_drops_satisfied_and_falsified():
    y, z = 0, 1
    st_ = condition(CnfFormula(2, [[y, z], [y, ~z]]), [z])
    assert st_.remaining_clauses() == [(y,)]


def test_conditioning_empty_clause():
    st_ = condition(CnfFormula(2, [[A, B], [~A]]), [A])
    assert st_.has_empty_clause
    assert () in st_.remaining_clauses()


def test_conditioning_empty_trail_is_identity():
    f = CnfFormula(3, [[A, ~B], [B, C]])
    assert condition(f).remaining_clauses() == [(A, ~B), (B, C)]


def test_assigning_twice_rejected():
    st_ = condition(CnfFormula(1, [[A]]), [A])
    with pytest.raises(ValueError):
        st_.assign(~A)


# -- unit propagation ---------------------------------------------------------------

def test_unit_chain():
    st_ = condition(CnfFormula(3, [[A], [~A, B], [~B, C]]))
    assert unit_propagate(st_)
    assert st_.trail == [A, B, C]
    assert st_.reasons == [Reason.UNIT] * 3
    assert st_.is_satisfied


def test_unit_contradiction():
    st_ = condition(CnfFormula(1, [[A], [~A]]))
    assert not unit_propagate(st_)
    assert st_.has_empty_clause


def test_no_units_no_change():
    st_ = condition(CnfFormula(2, [[A, B]]))
    assert unit_propagate(st_)
    assert st_.trail == []


def test_pure_literal_free_only():
    z, a, b = 0, 1, 2
    f = CnfFormula(3, [[z, a], [z, b]], graph_vars=[a, b])
    st_ = condition(f)
    assert pure_literal_eliminate(st_) == 1
    assert st_.trail == [z]
    assert st_.is_satisfied


def test_pure_literal_skips_graph_vars():
    f = CnfFormula(2, [[A, B]], graph_vars=[A, B])
    st_ = condition(f)
    assert pure_literal_eliminate(st_) == 0


def test_pure_literal_needs_one_polarity():
    f = CnfFormula(2, [[A, B], [~A, B]], graph_vars=[B])
    st_ = condition(f)
    assert pure_literal_eliminate(st_) == 0


# -- Tseitin -------------------------------------------------------------------------

def test_tseitin_two_clause_restriction():
    # (a and b) or c, fresh variables C1=3, C2=4
    f, defs = compile_dnf_restrictions([[[A, B], [C]]], 3, graph_vars=[A, B, C])
    c1, c2 = 3, 4
    assert f.clauses == [(c1, c2), (c1, ~A, ~B), (~c1, A), (~c1, B), (c2, ~C), (~c2, C)]
    assert defs == {c1: Definition("and", (A, B)), c2: Definition("and", (C,))}
    assert f.kinds[c1] is Kind.FREE and f.kinds[A] is Kind.GRAPH


def test_tseitin_single_literal():
    f, defs = compile_dnf_restrictions([[[A]]], 1)
    assert f.clauses == [(1,), (1, ~A), (~1, A)]


def test_tseitin_empty():
    f, defs = compile_dnf_restrictions([], 4)
    assert f.clauses == [] and defs == {}
    assert f.num_vars == 4


def test_tseitin_rejects_empty_dnf_clause():
    with pytest.raises(ValueError):
        compile_dnf_restrictions([[[A], []]], 1)


# -- complete and check ---------------------------------------------------------------

def _ab_or_c():
    f, defs = compile_dnf_restrictions([[[A, B], [C]]], 3, graph_vars=[A, B, C])
    return f, defs


def test_complete_satisfied():
    f, defs = _ab_or_c()
    st_ = condition(f)
    trail = complete_and_check(st_, [A, B, ~C], defs)
    assert trail is not None
    assert 3 in trail and ~4 in trail
    assert st_.trail == []


def test_complete_unsatisfied():
    f, defs = _ab_or_c()
    st_ = condition(f)
    assert complete_and_check(st_, [~A, ~B, ~C], defs) is None
    assert st_.trail == []


def test_complete_empty_formula():
    st_ = condition(CnfFormula(2))
    assert complete_and_check(st_, [A, ~B], {}) == [A, ~B]


def test_complete_searches_plain_free_vars():
    # z is free and undefined: y=false needs z and not z
    y, z = 0, 1
    f = CnfFormula(2, [[y, z], [y, ~z]], graph_vars=[y])
    assert complete_and_check(condition(f), [~y], {}) is None
    assert complete_and_check(condition(f), [y], {}) is not None


# -- conflicts ---------------------------------------------------------------------

def test_standard_conflict_free_bad():
    y, z = 2, 3
    f = CnfFormula(4, [[y, z], [y, ~z]], graph_vars=[0, 1, 2])
    st_ = condition(f)
    mark = st_.mark()
    # the path s-v-t sets y false; z completes to either value
    st_.assign(~y, Reason.TENTATIVE)
    st_.assign(z, Reason.TENTATIVE)
    conf = extract_conflict(st_, mark, "standard")
    assert set(conf.variables) == {y, z}


def test_graph_conflict_expands_tseitin_vars():
    # the violated clause {y, C1} with C1 = a and b expands to {y, a, b}
    y, a, b, c1 = 0, 1, 2, 3
    f = CnfFormula(4, [[y, c1], [c1, ~a, ~b], [~c1, a], [~c1, b]], graph_vars=[y, a, b])
    defs = {c1: Definition("and", (a, b))}
    st_ = condition(f)
    mark = st_.mark()
    for lit in (~y, ~a, b):
        st_.assign(lit, Reason.TENTATIVE)
    st_.complete(defs)
    std = extract_conflict(st_, mark, "standard", defs)
    assert set(std.variables) == {y, c1}
    graph = extract_conflict(st_, mark, "graph", defs)
    assert set(graph.variables) == {y, a, b}
    assert graph.flavor == "graph"


def test_graph_conflict_keeps_or_aggregates():
    g1, g2, agg = 0, 1, 2
    f = CnfFormula(4, [[~agg], [~agg, g1, g2], [agg, ~g1], [agg, ~g2]], graph_vars=[g1, g2])
    defs = {agg: Definition("or", (g1, g2))}
    st_ = condition(f)
    mark = st_.mark()
    st_.assign(g1, Reason.TENTATIVE)
    st_.assign(~g2, Reason.TENTATIVE)
    st_.complete(defs)
    assert set(extract_conflict(st_, mark, "graph", defs).variables) == {agg}


def test_conflict_excludes_prefix_assignments():
    f = CnfFormula(3, [[A, B, C]])
    st_ = condition(f, [~A])
    mark = st_.mark()
    st_.assign(~B, Reason.TENTATIVE)
    st_.assign(~C, Reason.TENTATIVE)
    assert set(extract_conflict(st_, mark).variables) == {B, C}


def test_conflict_on_satisfied_formula_rejected():
    st_ = condition(CnfFormula(1, [[A]]), [A])
    with pytest.raises(ValueError):
        extract_conflict(st_, 0)


# -- properties -----------------------------------------------------------------------

N_VARS = 6


@st.composite
def formulas(draw, n=N_VARS):
    lit = st.integers(0, n - 1).flatmap(lambda v: st.sampled_from([v, ~v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=10))
    return CnfFormula(n, clauses)


def _consistent(lits):
    seen = {}
    out = []
    for lit in lits:
        v = var_of(lit)
        if v not in seen:
            seen[v] = lit
            out.append(lit)
    return out


lit_lists = st.lists(st.integers(0, N_VARS - 1).flatmap(lambda v: st.sampled_from([v, ~v])), max_size=N_VARS)


@given(formulas(), lit_lists)
def test_conditioning_order_invariant(f, lits):
    lits = _consistent(lits)
    fwd = condition(f, lits)
    bwd = condition(f, list(reversed(lits)))
    assert remaining(fwd) == remaining(bwd)
    assert fwd.has_empty_clause == bwd.has_empty_clause


def _snapshot(st_):
    return (list(st_.value), list(st_.pos), list(st_.trail), list(st_.free_count),
            list(st_.sat_count), st_.n_satisfied, st_.n_falsified)


@given(formulas(), lit_lists, lit_lists)
def test_rollback_exact(f, first, more):
    first = _consistent(first)
    st_ = condition(f, first)
    unit_propagate(st_)
    before = _snapshot(st_)
    rem = st_.remaining_clauses()
    mark = st_.mark()
    for lit in _consistent(more):
        if not st_.is_assigned(var_of(lit)):
            st_.assign(lit)
    unit_propagate(st_)
    st_.rollback(mark)
    assert _snapshot(st_) == before
    assert st_.remaining_clauses() == rem
    # propagation after rollback behaves like on a fresh state
    fresh = condition(f, first)
    unit_propagate(fresh)
    assert unit_propagate(st_) == unit_propagate(fresh)
    assert st_.trail == fresh.trail


def _models(f):
    n = f.num_vars
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[l] if l >= 0 else not bits[~l] for l in c) for c in f.clauses):
            yield bits


@given(formulas(), lit_lists)
def test_unit_propagation_sound(f, lits):
    lits = _consistent(lits)
    st_ = condition(f, lits)
    ok = unit_propagate(st_)
    extending = [m for m in _models(f)
                 if all(m[l] if l >= 0 else not m[~l] for l in lits)]
    if not ok:
        assert not extending
        return
    for m in extending:
        for lit in st_.trail:
            assert m[lit] if lit >= 0 else not m[~lit]


@given(formulas(), lit_lists)
def test_dpll_agrees_with_enumeration(f, lits):
    lits = _consistent(lits)
    st_ = condition(f, lits)
    extending = any(all(m[l] if l >= 0 else not m[~l] for l in lits) for m in _models(f))
    assert st_.solve() == extending
    if extending:
        assert st_.is_satisfied


@pytest.mark.parametrize("seed", range(40))
def test_tseitin_equisatisfiable_small(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    restr = random_restrictions(rng, n)
    f, defs = compile_dnf_restrictions(restr, n)
    assert condition(f).solve() == dnf_satisfiable(restr, n)


@pytest.mark.parametrize("seed", range(20))
def test_completion_decides_dnf(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(1, 6)
    restr = random_restrictions(rng, n)
    f, defs = compile_dnf_restrictions(restr, n, graph_vars=range(n))
    for bits in itertools.product((False, True), repeat=n):
        tentative = [v if bits[v] else ~v for v in range(n)]
        got = complete_and_check(condition(f), tentative, defs) is not None
        want = dnf_satisfiable([[[l for l in c] for c in r] for r in restr]
                               + [[[v if bits[v] else ~v]] for v in range(n)], n)
        assert got == want
