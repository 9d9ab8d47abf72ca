import random

import pytest
from hypothesis import given, settings, strategies as st

from minerror import inference as I
from minerror.inference import BOOL, INT, TVar, fun, product
from minerror.solver import _pykernel, kernel
from minerror.solver.theory import TermStore, theory_check

from oracles import random_term, resolve, rewrite_unify


def test_sat_with_unifier():
    r = theory_check([(TVar(1), INT), (TVar(2), fun(TVar(1), TVar(1)))])
    assert r.sat
    assert I.apply(r.subst, TVar(2)) == fun(INT, INT)


def test_constructor_clash_core():
    r = theory_check([(TVar(1), INT), (TVar(1), BOOL)])
    assert not r.sat and r.core == [0, 1]


def test_occurs_check_core():
    r = theory_check([(TVar(1), fun(TVar(2), INT)), (TVar(2), TVar(1))])
    assert not r.sat and r.core == [0, 1]


def test_core_ignores_irrelevant_atoms():
    atoms = [(TVar(5), BOOL), (TVar(1), INT), (TVar(3), TVar(4)), (TVar(1), TVar(2)), (TVar(2), BOOL)]
    r = theory_check(atoms)
    assert r.core == [1, 3, 4]


def test_arity_is_part_of_the_constructor():
    assert not theory_check([(product(INT, INT), product(INT, INT, INT))]).sat


def test_injectivity():
    r = theory_check([(fun(TVar(1), TVar(2)), fun(INT, BOOL))])
    assert r.subst[1] == INT and r.subst[2] == BOOL


def _sat(atoms):
    try:
        s = {}
        for a, b in atoms:
            s = I.unify(a, b, s)
        return s
    except I.UnifyError:
        return None


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_cores_are_irreducible(seed):
    rng = random.Random(seed)
    atoms = [(random_term(rng, 2), random_term(rng, 2)) for _ in range(rng.randint(1, 8))]
    r = theory_check(atoms)
    assert r.sat == (_sat(atoms) is not None)
    if not r.sat:
        core = [atoms[i] for i in r.core]
        assert _sat(core) is None
        for i in range(len(core)):
            assert _sat(core[:i] + core[i + 1:]) is not None


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_unifier_is_most_general(seed):
    rng = random.Random(seed)
    atoms = [(random_term(rng, 2), random_term(rng, 2)) for _ in range(rng.randint(1, 5))]
    r = theory_check(atoms)
    ref = rewrite_unify(atoms)
    assert r.sat == (ref is not None)
    if r.sat:
        for a, b in atoms:
            assert I.apply(r.subst, a) == I.apply(r.subst, b)
        # the reference solution is an instance of ours and vice versa
        for v in ref:
            ours = I.apply(r.subst, TVar(v))
            theirs = resolve(ref, TVar(v))
            assert I.generic_instance(I.TypeSchema.mono(theirs), I.TypeSchema(frozenset(I.free_vars(ours)), ours))
            assert I.generic_instance(I.TypeSchema.mono(ours), I.TypeSchema(frozenset(I.free_vars(theirs)), theirs))


@pytest.mark.skipif(kernel.IMPLEMENTATION != "cython", reason="compiled kernel not built")
def test_compiled_kernel_matches_python_kernel():
    from minerror.solver import _ckernel

    rng = random.Random(4)
    for _ in range(300):
        terms = [random_term(rng, 3, 6) for _ in range(2 * rng.randint(1, 10))]
        graphs = [_pykernel.TermGraph(), _ckernel.TermGraph()]
        results = []
        for g in graphs:
            store = TermStore()
            store.graph = g
            pairs = [store.intern(t) for t in terms]
            ff = g.first_failure(pairs)
            results.append((ff, g.solution(pairs) if ff < 0 else None))
        assert results[0] == results[1]
