"""Hindley-Milner machinery over the inductive datatype of types.

Type terms are ``TVar`` leaves or ``TCon`` constructor applications; the
constructors are ``int``, ``bool``, ``string``, ``fun`` (arity 2) and
``product`` (arity 2 or 3).  Principal types are computed by collecting
equations while walking the expression and solving them by unification.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

from . import syntax as S


@dataclass(frozen=True, slots=True)
class TVar:
    id: int

    def __str__(self) -> str:
        return f"t{self.id}"


@dataclass(frozen=True, slots=True)
class TCon:
    name: str
    args: tuple["TypeTerm", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "(" + " ".join([self.name, *map(str, self.args)]) + ")"


TypeTerm = Union[TVar, TCon]

INT = TCon("int")
BOOL = TCon("bool")
STRING = TCon("string")

ARITY = {"int": (0,), "bool": (0,), "string": (0,), "fun": (2,), "product": (2, 3)}


def fun(a: TypeTerm, b: TypeTerm) -> TCon:
    return TCon("fun", (a, b))


def product(*xs: TypeTerm) -> TCon:
    return TCon("product", tuple(xs))


def free_vars(t: TypeTerm, acc: Optional[set[int]] = None) -> set[int]:
    if acc is None:
        acc = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, TVar):
            acc.add(x.id)
        else:
            stack.extend(x.args)
    return acc


def ordered_vars(t: TypeTerm) -> list[int]:
    """Variables of ``t`` in order of first occurrence (left to right)."""
    seen: dict[int, None] = {}

    def go(x: TypeTerm) -> None:
        if isinstance(x, TVar):
            seen.setdefault(x.id)
        else:
            for a in x.args:
                go(a)

    go(t)
    return list(seen)


def is_ground(t: TypeTerm) -> bool:
    return not free_vars(t)


def substitute(t: TypeTerm, s: Mapping[int, TypeTerm]) -> TypeTerm:
    """Apply ``s`` once (no chasing); callers keep ``s`` idempotent."""
    if isinstance(t, TVar):
        return s.get(t.id, t)
    if not t.args:
        return t
    return TCon(t.name, tuple(substitute(a, s) for a in t.args))


def term_size(t: TypeTerm) -> int:
    if isinstance(t, TVar):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


_TYPE_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_type(text: str) -> TypeTerm:
    """Read the s-expression form produced by ``str(term)``: ``(fun t1 int)``."""
    toks = [m.group(1) for m in _TYPE_TOKEN.finditer(text)]
    pos = 0

    def go() -> TypeTerm:
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok == "(":
            name = toks[pos]
            pos += 1
            args = []
            while toks[pos] != ")":
                args.append(go())
            pos += 1
            return _con(name, tuple(args))
        if re.fullmatch(r"t-?\d+", tok):
            return TVar(int(tok[1:]))
        return _con(tok, ())

    t = go()
    if pos != len(toks):
        raise ValueError(f"trailing input in type {text!r}")
    return t


def _con(name: str, args: tuple[TypeTerm, ...]) -> TCon:
    if name not in ARITY or len(args) not in ARITY[name]:
        raise ValueError(f"bad constructor {name}/{len(args)}")
    return TCon(name, args)


# ---------------------------------------------------------------------------
# unification


class UnifyError(Exception):
    pass


class ConstructorClash(UnifyError):
    pass


class ArityMismatch(UnifyError):
    pass


class OccursCheck(UnifyError):
    pass


class _Bindings:
    """Triangular substitution with path chasing; the working state of a unifier."""

    __slots__ = ("map",)

    def __init__(self, init: Optional[Mapping[int, TypeTerm]] = None):
        self.map: dict[int, TypeTerm] = dict(init or {})

    def walk(self, t: TypeTerm) -> TypeTerm:
        while isinstance(t, TVar):
            nxt = self.map.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def resolve(self, t: TypeTerm) -> TypeTerm:
        t = self.walk(t)
        if isinstance(t, TVar) or not t.args:
            return t
        return TCon(t.name, tuple(self.resolve(a) for a in t.args))

    def occurs(self, v: int, t: TypeTerm) -> bool:
        stack = [t]
        while stack:
            x = self.walk(stack.pop())
            if isinstance(x, TVar):
                if x.id == v:
                    return True
            else:
                stack.extend(x.args)
        return False

    def unify(self, a: TypeTerm, b: TypeTerm) -> None:
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = self.walk(x), self.walk(y)
            if x == y:
                continue
            if isinstance(x, TVar):
                if self.occurs(x.id, y):
                    raise OccursCheck(f"{x} occurs in {self.resolve(y)}")
                self.map[x.id] = y
            elif isinstance(y, TVar):
                if self.occurs(y.id, x):
                    raise OccursCheck(f"{y} occurs in {self.resolve(x)}")
                self.map[y.id] = x
            elif x.name != y.name:
                raise ConstructorClash(f"{x.name} vs {y.name}")
            elif len(x.args) != len(y.args):
                raise ArityMismatch(f"{x.name}/{len(x.args)} vs {y.name}/{len(y.args)}")
            else:
                stack.extend(zip(x.args, y.args))

    def idempotent(self) -> dict[int, TypeTerm]:
        return {v: self.resolve(TVar(v)) for v in self.map}


def unify(t1: TypeTerm, t2: TypeTerm, s: Optional[Mapping[int, TypeTerm]] = None) -> dict[int, TypeTerm]:
    """Most general idempotent extension of ``s`` equating ``t1`` and ``t2``.

    Raises a :class:`UnifyError` subclass when no unifier exists.
    """
    b = _Bindings(s)
    b.unify(t1, t2)
    return b.idempotent()


def apply(s: Mapping[int, TypeTerm], t: TypeTerm) -> TypeTerm:
    return substitute(t, s)


# ---------------------------------------------------------------------------
# schemas


@dataclass(frozen=True)
class TypeSchema:
    """``∀bound. body``.  Canonical schemas number bound variables -1, -2, ...
    in order of first occurrence so equal schemas compare equal."""

    bound: frozenset[int]
    body: TypeTerm

    @staticmethod
    def mono(t: TypeTerm) -> "TypeSchema":
        return TypeSchema(frozenset(), t)

    def free_vars(self) -> set[int]:
        return free_vars(self.body) - self.bound

    def canonical(self) -> "TypeSchema":
        order = [v for v in ordered_vars(self.body) if v in self.bound]
        ren = {v: TVar(-(i + 1)) for i, v in enumerate(order)}
        return TypeSchema(frozenset(t.id for t in ren.values()), substitute(self.body, ren))

    def instantiate(self, fresh: Iterator[int]) -> TypeTerm:
        if not self.bound:
            return self.body
        return substitute(self.body, {v: TVar(next(fresh)) for v in self.bound})

    def __str__(self) -> str:
        return show_schema(self)


def _letters() -> Iterator[str]:
    for n in itertools.count(1):
        for combo in itertools.product("abcdefghijklmnopqrstuvwxyz", repeat=n):
            yield "".join(combo)


def show_type(t: TypeTerm, names: Optional[Mapping[int, str]] = None) -> str:
    """OCaml-style rendering: ``int * string * a -> int``."""
    names = names or {}

    def go(x: TypeTerm, prec: int) -> str:
        if isinstance(x, TVar):
            return names.get(x.id, str(x))
        if x.name == "fun":
            s = f"{go(x.args[0], 1)} -> {go(x.args[1], 0)}"
            return s if prec == 0 else f"({s})"
        if x.name == "product":
            s = " * ".join(go(a, 2) for a in x.args)
            return s if prec <= 1 else f"({s})"
        return x.name

    return go(t, 0)


def show_schema(sigma: TypeSchema) -> str:
    order = [v for v in ordered_vars(sigma.body) if v in sigma.bound]
    names = dict(zip(order, _letters()))
    body = show_type(sigma.body, names)
    if not order:
        return body
    return "∀" + " ".join(names[v] for v in order) + ". " + body


def _as_schema(x: Union[TypeSchema, TypeTerm]) -> TypeSchema:
    return x if isinstance(x, TypeSchema) else TypeSchema.mono(x)


def generic_instance(sigma_prime: Union[TypeSchema, TypeTerm], sigma: Union[TypeSchema, TypeTerm]) -> bool:
    """True iff ``sigma_prime`` is a generic instance of ``sigma``."""
    sp, s = _as_schema(sigma_prime), _as_schema(sigma)
    if sp.bound & s.free_vars():
        return False
    # bound variables of sigma_prime are rigid: only sigma's bound variables may be instantiated
    binding: dict[int, TypeTerm] = {}
    stack = [(s.body, sp.body)]
    while stack:
        pat, tgt = stack.pop()
        if isinstance(pat, TVar):
            if pat.id in s.bound:
                prev = binding.setdefault(pat.id, tgt)
                if prev != tgt:
                    return False
            elif pat != tgt:
                return False
        elif isinstance(tgt, TVar) or pat.name != tgt.name or len(pat.args) != len(tgt.args):
            return False
        else:
            stack.extend(zip(pat.args, tgt.args))
    return True


def _builtin_env() -> dict[str, TypeSchema]:
    return {name: TypeSchema.mono(parse_type(t)) for name, t in S.BUILTINS.items()}


BUILTIN_ENV: dict[str, TypeSchema] = _builtin_env()


# ---------------------------------------------------------------------------
# inference


class _Untypable(Exception):
    pass


class _Infer:
    def __init__(self, start: int):
        self.fresh = itertools.count(start)
        self.b = _Bindings()

    def new(self) -> TVar:
        return TVar(next(self.fresh))

    def eq(self, a: TypeTerm, b: TypeTerm) -> None:
        try:
            self.b.unify(a, b)
        except UnifyError as exc:
            raise _Untypable from exc

    def env_vars(self, env: Mapping[str, TypeSchema]) -> set[int]:
        acc: set[int] = set()
        for sch in env.values():
            for v in free_vars(sch.body) - sch.bound:
                free_vars(self.b.resolve(TVar(v)), acc)
        return acc

    def infer(self, e: S.Expr, env: Mapping[str, TypeSchema]) -> TypeTerm:
        if isinstance(e, S.Var):
            try:
                return env[e.name].instantiate(self.fresh)
            except KeyError:
                raise _Untypable from None
        if isinstance(e, S.IntLit):
            return INT
        if isinstance(e, S.BoolLit):
            return BOOL
        if isinstance(e, S.StrLit):
            return STRING
        if isinstance(e, S.Hole):
            return self.new()
        if isinstance(e, S.Lam):
            inner = dict(env)
            if isinstance(e.param, str):
                arg: TypeTerm = self.new()
                if e.param != S.WILDCARD:
                    inner[e.param] = TypeSchema.mono(arg)
            else:
                parts = [self.new() for _ in e.param]
                arg = product(*parts)
                for name, t in zip(e.param, parts):
                    if name != S.WILDCARD:
                        inner[name] = TypeSchema.mono(t)
            return fun(arg, self.infer(e.body, inner))
        if isinstance(e, S.App):
            tf = self.infer(e.fn, env)
            ta = self.infer(e.arg, env)
            r = self.new()
            self.eq(tf, fun(ta, r))
            return r
        if isinstance(e, S.If):
            self.eq(self.infer(e.cond, env), BOOL)
            t = self.infer(e.then, env)
            self.eq(t, self.infer(e.else_, env))
            return t
        if isinstance(e, S.Tuple):
            return product(*(self.infer(x, env) for x in e.elements))
        if isinstance(e, S.Let):
            t1 = self.b.resolve(self.infer(e.defn, env))
            inner = dict(env)
            if e.name != S.WILDCARD:
                gen = free_vars(t1) - self.env_vars(env)
                inner[e.name] = TypeSchema(frozenset(gen), t1)
            else:
                inner.pop(e.name, None)
            return self.infer(e.body, inner)
        raise TypeError(e)


def principal(env: Mapping[str, TypeSchema], e: S.Expr) -> Optional[TypeSchema]:
    """Principal schema of ``e`` under ``env``, or None if ``e`` is ill-typed there.

    Type variables free in ``env`` are treated as fixed unknowns: they are never
    instantiated, so a result exists only if ``e`` types without constraining
    them.  The result is canonical.
    """
    env_free: set[int] = set()
    for sch in env.values():
        env_free |= sch.free_vars()
    rigid = {v: TCon(f"'{v}") for v in env_free}
    back = {f"'{v}": v for v in env_free}
    senv = {k: TypeSchema(s.bound, substitute(s.body, {v: r for v, r in rigid.items() if v not in s.bound}))
            for k, s in env.items()}
    start = max([0, *env_free, *(v for s in env.values() for v in free_vars(s.body))]) + 1
    inf = _Infer(start)
    try:
        t = inf.b.resolve(inf.infer(e, senv))
    except _Untypable:
        return None
    t = _unrigid(t, back)
    return TypeSchema(frozenset(free_vars(t) - env_free), t).canonical()


def _unrigid(t: TypeTerm, back: Mapping[str, int]) -> TypeTerm:
    if isinstance(t, TVar):
        return t
    if not t.args:
        v = back.get(t.name)
        return TVar(v) if v is not None else t
    return TCon(t.name, tuple(_unrigid(a, back) for a in t.args))


def well_typed(p: S.Expr, env: Optional[Mapping[str, TypeSchema]] = None) -> bool:
    return principal(BUILTIN_ENV if env is None else env, p) is not None


def type_of(p: S.Expr) -> Optional[TypeSchema]:
    return principal(BUILTIN_ENV, p)
