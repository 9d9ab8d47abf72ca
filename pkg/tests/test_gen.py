import pytest

from minerror import gen as G
from minerror import inference as I
from minerror import localizer as L
from minerror import syntax as S


def test_depth_one_without_error_is_well_typed():
    assert I.well_typed(S.parse(G.gen_nested_poly(1, 0, inject=False)))


@pytest.mark.parametrize("seed", range(8))
def test_injected_error_makes_program_ill_typed(seed):
    assert not I.well_typed(S.parse(G.gen_nested_poly(3, seed)))


def test_same_seed_same_program():
    assert G.gen_nested_poly(5, 42) == G.gen_nested_poly(5, 42)


def test_depth_bounds():
    with pytest.raises(ValueError):
        G.gen_nested_poly(0)
    with pytest.raises(ValueError):
        G.gen_nested_poly(G.MAX_NESTED_DEPTH + 1)


def test_naive_assertions_double_with_depth():
    counts = []
    for d in range(2, 7):
        _, trace = L.naive_min_error(S.parse(G.gen_nested_poly(d, 1)))
        counts.append(trace.records[-1].assertions)
    assert all(b >= 1.7 * a for a, b in zip(counts, counts[1:]))


def test_random_corpus_properties():
    ps = G.random_corpus(30, seed=2, max_nodes=20)
    assert len({S.pretty(p) for p in ps}) == 30
    assert all(S.size(p) <= 20 and not I.well_typed(p) for p in ps)
    assert G.random_corpus(30, seed=2, max_nodes=20) == ps


def test_well_typed_corpus():
    assert all(I.well_typed(p) for p in G.random_corpus(10, seed=3, ill_typed=False))


def test_mutated_corpus_is_ill_typed():
    assert not any(I.well_typed(p) for p in G.random_corpus(10, seed=4, mutated=True))
