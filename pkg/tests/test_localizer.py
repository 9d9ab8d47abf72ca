import random

import pytest
from hypothesis import given, settings, strategies as st

from minerror import constraints as C
from minerror import gen as G
from minerror import inference as I
from minerror import localizer as L
from minerror import syntax as S

FIRST_USE = (1, 1, 0, 0, 0, 0)
F_USES = {(1, 1, 1, 0), (1, 1, 1, 1, 2, 0)}


def test_running_example_iterative(running):
    src, trace = L.iter_min_error(running)
    assert src.cost == 1
    assert src.locations == {FIRST_USE}
    assert src.iterations == 1 and trace.solve_calls == 2
    assert set(trace.records[0].new_usages) == F_USES
    assert src.expansions == 2
    assert [r.penalty for r in trace.records] == [1, 1]


def test_running_example_never_expands_second(running):
    _, trace = L.iter_min_error(running)
    expanded = {u for r in trace.records for u in r.new_usages}
    assert (1, 1, 0, 0, 1, 0, 1, 0) not in expanded


def test_running_example_naive_and_brute(running):
    naive, _ = L.naive_min_error(running)
    assert naive.cost == 1
    assert I.well_typed(S.mask(running, naive.locations))
    brute = L.brute_force_min_error(running, max_nodes=40)
    assert brute.cost == 1


def test_brute_force_cap(running):
    with pytest.raises(L.InstanceTooLarge):
        L.brute_force_min_error(running)


def test_cost_two_source_is_valid_but_not_minimum(running):
    # masking the two string literals "1" and "3" also fixes the program
    locs = {(1, 1, 1, 1, 0), (1, 1, 1, 1, 2, 1, 0)}
    assert all(isinstance(S.subexpr(running, l), S.StrLit) for l in locs)
    assert I.well_typed(S.mask(running, locs))
    assert S.ast_size_cost(running)(locs) == 2


def test_well_typed_program_has_empty_source():
    p = S.parse("let id x = x in id 1")
    src, trace = L.iter_min_error(p)
    assert src.locations == frozenset() and src.cost == 0 and src.iterations == 0
    assert L.naive_min_error(p)[0].cost == 0
    assert L.brute_force_min_error(p).cost == 0


def test_holes_type_check():
    p = S.parse("? 1 true")
    assert L.brute_force_min_error(p).locations == frozenset()


def test_ill_typed_definition_is_in_initial_frontier():
    p = S.parse("let g = 1 true in g")
    idx = C.build_index(p)
    assert (0,) in idx.frontier0 and (0,) not in idx.typed_defs
    src, _ = L.iter_min_error(p)
    assert src.cost == 1 and src.iterations == 0
    assert all(S.is_prefix((0,), l) for l in src.locations)
    assert src.cost == L.brute_force_min_error(p).cost


def test_scope_hides_usages_inside_unexpanded_definitions(running):
    idx = C.build_index(running)
    sc = L.scope(idx, idx.frontier0)
    assert F_USES <= sc
    assert FIRST_USE not in sc
    assert L.scope(idx, idx.full_expansion()) == set(idx.dloc)


def test_scope_without_lets_is_empty():
    p = S.parse("(fun x -> x + 1) 2")
    assert L.scope(C.build_index(p), []) == frozenset()


def test_usages_of_first_iteration(running):
    idx = C.build_index(running)
    step = L.solve_step(running, S.ast_size_cost(running), idx.frontier0, index=idx)
    assert L.usages(idx, idx.frontier0, step) == F_USES


def test_usages_empty_for_penalty_free_model():
    p = S.parse("let id x = x in id 1")
    idx = C.build_index(p)
    step = L.solve_step(p, S.ast_size_cost(p), idx.frontier0, index=idx)
    assert step.result.penalty == 0 and L.usages(idx, idx.frontier0, step) == frozenset()


def _minimal(p, locs):
    locs = list(locs)
    for i in range(len(locs)):
        if I.well_typed(S.mask(p, locs[:i] + locs[i + 1:])):
            return False
    return True


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_iterative_matches_brute_force(seed):
    p = G.random_corpus(1, seed=seed, poly_top=seed % 2 == 0)[0]
    src, trace = L.iter_min_error(p)
    assert I.well_typed(S.mask(p, src.locations))
    assert _minimal(p, src.locations)
    assert src.cost == L.brute_force_min_error(p).cost
    sizes = [r.expanded for r in trace.records]
    assert sizes == sorted(set(sizes))
    penalties = [r.penalty for r in trace.records]
    assert penalties == sorted(penalties) and penalties[-1] <= src.cost


def test_hard_builtins_are_never_blamed():
    p = S.parse('1 + "a"')
    cost = S.ast_size_cost(p, hard_builtins=True)
    src, _ = L.iter_min_error(p, cost)
    assert src.locations == {(1,)}


def test_dup_opt_does_not_change_cost():
    for p in G.random_corpus(15, seed=21, poly_top=True):
        a, _ = L.iter_min_error(p)
        b, _ = L.iter_min_error(p, dup_opt=False)
        assert a.cost == b.cost
