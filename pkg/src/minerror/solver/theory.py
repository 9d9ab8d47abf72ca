"""Decision procedure for conjunctions of equalities over the type datatype.

Constructor terms are distinct across constructors, injective, and finite, so
a conjunction of equalities is satisfiable iff it unifies.  Unsat cores are
shrunk to irreducible ones by the progression method: each round finds the
first atom that breaks the prefix ``core + candidates`` and keeps it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .. import inference as I
from ..inference import TCon, TVar, TypeTerm
from . import kernel

_CODES = {"int": 1, "bool": 2, "string": 3, "fun": 4, "product": 5}


class TermStore:
    """Hash-consed term graph shared by every check on one instance."""

    def __init__(self):
        self.graph = kernel.TermGraph()
        self._ids: dict[object, int] = {}
        self.var_node: dict[int, int] = {}
        self._codes = dict(_CODES)
        self._names = {v: k for k, v in self._codes.items()}

    def intern(self, t: TypeTerm) -> int:
        if isinstance(t, TVar):
            n = self.var_node.get(t.id)
            if n is None:
                n = self.graph.add_node(0, ())
                self.var_node[t.id] = n
                self._ids[n] = t
            return n
        kids = tuple(self.intern(a) for a in t.args)
        code = self._codes.get(t.name)
        if code is None:
            code = self._codes[t.name] = len(self._codes) + 1
            self._names[code] = t.name
        # arity is part of the code so product/2 and product/3 clash
        key = (code, kids)
        n = self._ids.get(key)
        if n is None:
            n = self.graph.add_node(code * 8 + len(kids), kids)
            self._ids[key] = n
        return n

    def con_name(self, kind: int) -> str:
        return self._names[kind // 8]


@dataclass
class TheoryResult:
    sat: bool
    subst: Optional[dict[int, TypeTerm]] = None
    core: Optional[list[int]] = None


def _pairs(eqs: Sequence[tuple[int, int]]) -> list[int]:
    out: list[int] = []
    for a, b in eqs:
        out.append(a)
        out.append(b)
    return out


def minimal_core(store: TermStore, eqs: Sequence[tuple[int, int]], keys: Sequence[int]) -> list[int]:
    """Irreducible unsatisfiable subset of ``eqs`` (known to be unsat), as a list of keys."""
    g = store.graph
    core: list[int] = []
    cand = list(range(len(eqs)))
    while True:
        order = core + cand
        k = g.first_failure(_pairs([eqs[i] for i in order]))
        if k < 0:
            raise AssertionError("minimal_core called on a satisfiable set")
        if k < len(core):
            return [keys[i] for i in core]
        k -= len(core)
        core.append(cand[k])
        cand = cand[:k]


def solution(store: TermStore, eqs: Sequence[tuple[int, int]], variables: Iterable[int],
             default: TypeTerm = I.INT) -> dict[int, TypeTerm]:
    """Ground assignment for ``variables`` under the most general unifier of ``eqs``.

    Unconstrained variables are grounded to ``default``.
    """
    g = store.graph
    rep = g.solution(_pairs(eqs))
    memo: dict[int, TypeTerm] = {}

    def build(n: int) -> TypeTerm:
        s = rep[n]
        if s < 0:
            return default
        if s in memo:
            return memo[s]
        kind = g.kind[s]
        t = TCon(store.con_name(kind), tuple(build(c) for c in g.kids[s]))
        memo[s] = t
        return t

    out = {}
    for v in variables:
        n = store.var_node.get(v)
        out[v] = default if n is None else build(n)
    return out


def most_general(store: TermStore, eqs: Sequence[tuple[int, int]], variables: Iterable[int]) -> dict[int, TypeTerm]:
    """Like :func:`solution` but leaves unconstrained classes as variables (named by a class member)."""
    g = store.graph
    rep = g.solution(_pairs(eqs))
    back = {n: v for v, n in store.var_node.items()}

    def build(n: int, depth: int = 0) -> TypeTerm:
        s = rep[n]
        if s < 0:
            return TVar(back[-s - 1])
        return TCon(store.con_name(g.kind[s]), tuple(build(c) for c in g.kids[s]))

    return {v: build(store.var_node[v]) if v in store.var_node else TVar(v) for v in variables}


def theory_check(atoms: Sequence[tuple[TypeTerm, TypeTerm]], store: Optional[TermStore] = None) -> TheoryResult:
    """Check a conjunction of equalities.

    Returns a most general unifier on success, otherwise an irreducible core
    given as indices into ``atoms``.
    """
    store = store or TermStore()
    eqs = [(store.intern(a), store.intern(b)) for a, b in atoms]
    if store.graph.first_failure(_pairs(eqs)) < 0:
        vs: set[int] = set()
        for a, b in atoms:
            I.free_vars(a, vs)
            I.free_vars(b, vs)
        return TheoryResult(True, subst=most_general(store, eqs, sorted(vs)))
    return TheoryResult(False, core=sorted(minimal_core(store, eqs, list(range(len(eqs))))))
