import random

from hypothesis import given, settings, strategies as st

from minerror.solver.sat import SatSolver, _luby

from oracles import brute_sat


def test_luby_sequence():
    assert [_luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_empty_formula_is_satisfiable():
    s = SatSolver()
    assert s.solve()


def test_unit_conflict():
    s = SatSolver()
    s.add_clause([1])
    assert not s.add_clause([-1])
    assert not s.solve()


def test_assumption_core():
    s = SatSolver()
    s.add_clause([-1, 2])
    s.add_clause([-2, -3])
    assert not s.solve([1, 3, 4])
    assert set(s.core) == {1, 3}
    assert s.solve([1])
    assert s.value(2) and not s.value(3)


def test_pigeonhole_three_into_two():
    s = SatSolver()
    var = lambda p, h: 2 * p + h + 1
    for p in range(3):
        s.add_clause([var(p, 0), var(p, 1)])
    for h in range(2):
        for p in range(3):
            for q in range(p + 1, 3):
                s.add_clause([-var(p, h), -var(q, h)])
    assert not s.solve()


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_agrees_with_truth_tables(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 9)
    clauses = [[rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(1, 3))]
               for _ in range(rng.randint(0, 5 * n))]
    assumptions = [rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(0, 3))]
    s = SatSolver()
    s.ensure_vars(n)
    for c in clauses:
        s.add_clause(c)
    got = s.solve(assumptions)
    assert got == (brute_sat(clauses, n, assumptions) is not None)
    if got:
        assert all(any(s.value(x) for x in c) for c in clauses)
        assert all(s.value(x) for x in assumptions)
    else:
        assert set(s.core) <= set(assumptions)
        assert brute_sat(clauses, n, s.core) is None


def test_incremental_clauses_after_solving():
    s = SatSolver()
    s.add_clause([1, 2])
    assert s.solve([-1])
    s.add_clause([-2])
    assert not s.solve([-1])
    assert s.core == [-1]
    assert s.solve()
