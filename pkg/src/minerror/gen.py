"""Deterministic program generators for benchmarks and property tests."""

from __future__ import annotations

import random
from typing import Optional

from . import inference as I
from . import syntax as S

MAX_NESTED_DEPTH = 16

_ERRORS = (
    "{f} true",
    '{f} 0 + "x"',
    "if {f} 0 then 1 else 2",
    "({f} 0, {f} (1, 2))",
)


def gen_nested_poly(depth: int, seed: int = 0, *, inject: bool = True) -> str:
    """A chain of definitions, each applying the previous one twice.

    With ``inject`` the final expression contains one type error chosen by ``seed``.
    """
    if not 1 <= depth <= MAX_NESTED_DEPTH:
        raise ValueError(f"depth must be in 1..{MAX_NESTED_DEPTH}")
    rng = random.Random(seed)
    lines = ["let f0 x = x + 1"]
    for k in range(1, depth + 1):
        lines.append(f"let f{k} x = f{k - 1} (f{k - 1} x)")
    top = f"f{depth}"
    if inject:
        lines.append(rng.choice(_ERRORS).format(f=top))
    else:
        lines.append(f"{top} {rng.randint(0, 9)}")
    return "\n".join(lines) + "\n"


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.names = 0
        self.favour: list[str] = []

    def fresh(self) -> str:
        self.names += 1
        return f"v{self.names}"

    def leaf(self, scope: list[str]) -> S.Expr:
        r = self.rng.random()
        if self.favour and r < 0.3:
            return S.Var(self.rng.choice(self.favour))
        r = self.rng.random()
        if scope and r < 0.45:
            return S.Var(self.rng.choice(scope))
        if r < 0.55:
            return S.Var(self.rng.choice(sorted(S.BUILTINS)))
        if r < 0.75:
            return S.IntLit(self.rng.randint(0, 9))
        if r < 0.9:
            return S.BoolLit(self.rng.random() < 0.5)
        return S.StrLit(self.rng.choice("abc"))

    def expr(self, budget: int, scope: list[str]) -> S.Expr:
        """An expression with at most ``budget`` nodes."""
        rng = self.rng
        if budget <= 1:
            return self.leaf(scope)
        if budget == 2:
            x = self.fresh()
            return S.Lam(x, self.leaf(scope + [x]))
        kinds = ["app", "lam", "let"]
        if budget >= 5:
            kinds.append("plus")
        if budget >= 4:
            kinds += ["if", "tuple"]
        kind = rng.choice(kinds)
        if kind == "lam":
            x = self.fresh()
            return S.Lam(x, self.expr(budget - 1, scope + [x]))
        if kind == "let":
            x = self.fresh()
            a = rng.randint(1, budget - 2)
            if a >= 2 and rng.random() < 0.5:
                y = self.fresh()
                defn = S.Lam(y, self.expr(a - 1, scope + [y]))
            else:
                defn = self.expr(a, scope)
            return S.Let(x, defn, self.expr(budget - 1 - a, scope + [x]))
        if kind == "app":
            a = rng.randint(1, budget - 2)
            return S.App(self.expr(a, scope), self.expr(budget - 1 - a, scope))
        if kind == "plus":
            a = rng.randint(1, budget - 4)
            return S.App(S.App(S.Var("+"), self.expr(a, scope)), self.expr(budget - 3 - a, scope))
        if kind == "if":
            parts = _split(rng, budget - 1, 3)
            return S.If(*(self.expr(n, scope) for n in parts))
        parts = _split(rng, budget - 1, 2)
        return S.Tuple(tuple(self.expr(n, scope) for n in parts))


def _split(rng: random.Random, total: int, k: int) -> list[int]:
    cuts = sorted(rng.sample(range(1, total), k - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def random_program(rng: random.Random, max_nodes: int = 30, *, poly_top: bool = False) -> S.Expr:
    """A closed program with at most ``max_nodes`` nodes and locations assigned.

    ``poly_top`` starts the program with one or two function definitions whose
    names the rest of the program favours, which exercises principal types.
    """
    g = _Gen(rng)
    if not poly_top:
        return S.relocate(g.expr(rng.randint(3, max_nodes), []))
    scope: list[str] = []
    lets = []
    budget = rng.randint(12, max_nodes)
    for _ in range(rng.randint(1, 2)):
        f, y = g.fresh(), g.fresh()
        a = rng.randint(2, max(2, budget // 3))
        lets.append((f, S.Lam(y, g.expr(a, scope + [y]))))
        scope.append(f)
        budget -= a + 2
    g.favour = scope
    body = g.expr(max(budget, 3), scope)
    for f, d in reversed(lets):
        body = S.Let(f, d, body)
    return S.relocate(body)


def mutate(rng: random.Random, p: S.Expr) -> S.Expr:
    """Replace one leaf of ``p`` by a literal."""
    leaves = [n.loc for n in S.walk(p) if not n.children()]
    target = rng.choice(leaves)
    lit = rng.choice([S.IntLit(rng.randint(0, 9)), S.BoolLit(True), S.StrLit("s")])

    def go(e: S.Expr) -> S.Expr:
        if e.loc == target:
            return lit
        kids = e.children()
        return e.with_children(tuple(go(k) for k in kids)) if kids else e

    return S.relocate(go(p))


def random_corpus(count: int, seed: int = 0, *, max_nodes: int = 30,
                  ill_typed: Optional[bool] = True, min_lets: int = 0,
                  mutated: bool = False, poly_top: bool = False) -> list[S.Expr]:
    """``count`` distinct programs; ``ill_typed`` selects ill-typed, well-typed, or either (None).

    With ``mutated`` each program is a well-typed one with a single leaf replaced.
    """
    rng = random.Random(seed)
    out: list[S.Expr] = []
    seen: set[str] = set()
    while len(out) < count:
        p = random_program(rng, max_nodes, poly_top=poly_top)
        if S.size(p) > max_nodes:
            continue
        if mutated:
            if not I.well_typed(p):
                continue
            p = mutate(rng, p)
        text = S.pretty(p)
        if text in seen:
            continue
        if sum(isinstance(n, S.Let) for n in S.walk(p)) < min_lets:
            continue
        if ill_typed is not None and I.well_typed(p) == ill_typed:
            continue
        seen.add(text)
        out.append(p)
    return out
