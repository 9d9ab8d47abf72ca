import random

import pytest
from hypothesis import given, settings, strategies as st

from minerror import constraints as C
from minerror import inference as I
from minerror import localizer as L
from minerror import syntax as S
from minerror.inference import BOOL, INT, TVar
from minerror.solver.maxsat import (HardUnsatisfiable, InstanceTooLarge, oracle_wpmaxsmt,
                                    wpmaxsmt)
from minerror.solver.smt import SmtSolver

from oracles import random_wpmaxsmt


def test_smt_guarded_clash():
    s = SmtSolver()
    s.add_guarded_atom([1], TVar(10), INT)
    s.add_guarded_atom([1], TVar(10), BOOL)
    assert s.solve()
    assert not s.solve([1])
    assert s.core == [1]


def test_smt_empty():
    assert SmtSolver().solve()


def test_all_soft_satisfiable():
    r = wpmaxsmt([[1, 2]], [(1, 1), (2, 1)])
    assert r.penalty == 0 and r.achieved_weight == 2


def test_two_soft_example():
    for solve in (wpmaxsmt, oracle_wpmaxsmt):
        r = solve([[-1, -2]], [(1, 2), (2, 3)])
        assert r.penalty == 2
        assert r.model[2] and not r.model[1]


def test_theory_conflict_relaxes_cheapest():
    atoms = {4: (TVar(1), INT), 5: (TVar(1), BOOL)}
    hard = [[-1, 4], [-2, 5]]
    r = wpmaxsmt(hard, [(1, 5), (2, 2)], atoms)
    assert r.penalty == 2
    assert r.model.types[1] == INT


def test_unconstrained_types_default_to_int():
    r = wpmaxsmt([[3]], [(1, 1)], {3: (TVar(7), I.fun(TVar(8), TVar(8)))})
    assert r.model.types[7] == I.fun(INT, INT)


def test_hard_unsat_raises():
    with pytest.raises(HardUnsatisfiable):
        wpmaxsmt([[1], [-1]], [(2, 1)])
    with pytest.raises(HardUnsatisfiable):
        oracle_wpmaxsmt([[1], [-1]], [(2, 1)])


def test_oracle_size_cap():
    with pytest.raises(InstanceTooLarge):
        oracle_wpmaxsmt([], [(v, 1) for v in range(1, 26)])


def test_empty_soft():
    assert oracle_wpmaxsmt([[1]], []).achieved_weight == 0
    assert wpmaxsmt([[1]], []).penalty == 0


def test_preferences_pick_among_optima():
    # either 1 or 2 must be false, both weigh 1
    hard = [[-1, -2]]
    assert not wpmaxsmt(hard, [(1, 1), (2, 1)], prefer=[-1]).model[1]
    assert not wpmaxsmt(hard, [(1, 1), (2, 1)], prefer=[-2]).model[2]


def test_running_example_initial_abstraction(running):
    idx = C.build_index(running)
    step = L.solve_step(running, S.ast_size_cost(running), idx.frontier0, index=idx)
    assert step.result.penalty == 1
    assert (1, 1, 0) in step.false_pvars
    assert (0,) not in step.false_pvars and (1, 0) not in step.false_pvars


def _check_model(hard, soft, atoms, r):
    m = r.model
    for c in hard:
        assert any(m[x] if x > 0 else not m[-x] for x in c)
    s = {}
    for v, (a, b) in atoms.items():
        if m[v]:
            s = I.unify(a, b, s)
            assert I.substitute(a, m.types) == I.substitute(b, m.types)
    weights = {}
    for v, w in soft:
        weights[v] = weights.get(v, 0) + w
    assert r.penalty == sum(w for v, w in weights.items() if not m[v])
    assert r.penalty + r.achieved_weight == sum(weights.values())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_matches_oracle(seed):
    hard, soft, atoms = random_wpmaxsmt(random.Random(seed))
    try:
        expected = oracle_wpmaxsmt(hard, soft, atoms)
    except HardUnsatisfiable:
        with pytest.raises(HardUnsatisfiable):
            wpmaxsmt(hard, soft, atoms)
        return
    got = wpmaxsmt(hard, soft, atoms)
    assert got.achieved_weight == expected.achieved_weight
    _check_model(hard, soft, atoms, got)
    _check_model(hard, soft, atoms, expected)
