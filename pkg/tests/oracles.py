"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import random
from typing import Optional

from minerror.inference import BOOL, INT, STRING, TCon, TVar, TypeTerm


def rewrite_unify(eqs: list[tuple[TypeTerm, TypeTerm]]) -> Optional[dict[int, TypeTerm]]:
    """Martelli-Montanari rule rewriting on a set of equations.

    Returns a solved form {var: term} or None when a clash or cycle appears.
    """
    work = list(eqs)
    solved: dict[int, TypeTerm] = {}

    def subst(t, v, r):
        if isinstance(t, TVar):
            return r if t.id == v else t
        return TCon(t.name, tuple(subst(a, v, r) for a in t.args))

    def occurs(v, t):
        if isinstance(t, TVar):
            return t.id == v
        return any(occurs(v, a) for a in t.args)

    while work:
        s, t = work.pop()
        if s == t:
            continue  # delete
        if isinstance(s, TCon) and isinstance(t, TVar):
            work.append((t, s))  # orient
            continue
        if isinstance(s, TCon):
            if s.name != t.name or len(s.args) != len(t.args):
                return None  # clash
            work.extend(zip(s.args, t.args))  # decompose
            continue
        if occurs(s.id, t):
            return None  # occurs check
        # eliminate
        work = [(subst(a, s.id, t), subst(b, s.id, t)) for a, b in work]
        solved = {k: subst(v, s.id, t) for k, v in solved.items()}
        solved[s.id] = t
    return solved


def resolve(s: dict[int, TypeTerm], t: TypeTerm) -> TypeTerm:
    while isinstance(t, TVar) and t.id in s:
        t = s[t.id]
    if isinstance(t, TVar):
        return t
    return TCon(t.name, tuple(resolve(s, a) for a in t.args))


def random_term(rng: random.Random, depth: int, nvars: int = 5) -> TypeTerm:
    if depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.6:
            return TVar(rng.randint(1, nvars))
        return rng.choice([INT, BOOL, STRING])
    if rng.random() < 0.7:
        return TCon("fun", (random_term(rng, depth - 1, nvars), random_term(rng, depth - 1, nvars)))
    k = rng.choice([2, 3])
    return TCon("product", tuple(random_term(rng, depth - 1, nvars) for _ in range(k)))


def random_wpmaxsmt(rng: random.Random, max_soft: int = 24):
    """A small instance mixing boolean clauses with guarded type equalities."""
    nb = rng.randint(1, min(max_soft, 14))
    na = rng.randint(0, 8)
    atoms = {nb + i + 1: (random_term(rng, 2, 4), random_term(rng, 2, 4)) for i in range(na)}
    hard = []
    for a in atoms:
        guards = rng.sample(range(1, nb + 1), rng.randint(0, min(2, nb)))
        hard.append([-g for g in guards] + [a])
    for _ in range(rng.randint(0, nb)):
        k = rng.randint(1, 3)
        hard.append([rng.choice([1, -1]) * rng.randint(1, nb) for _ in range(k)])
    soft = [(v, rng.randint(1, 9)) for v in range(1, nb + 1) if rng.random() < 0.9]
    return hard, soft, atoms


def brute_sat(clauses, n, assumptions=()):
    for bits in itertools.product([False, True], repeat=n):
        val = lambda x: bits[abs(x) - 1] == (x > 0)
        if all(val(x) for x in assumptions) and all(any(val(x) for x in c) for c in clauses):
            return bits
    return None
