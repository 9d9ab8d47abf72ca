"""Guarded typing constraints with principal-type abstraction of let definitions.

Propositional variables are positive integers.  For the location with
pre-order index ``i`` the location variable is ``2*i + 1`` and the principal
type correctness variable of a let definition rooted there is ``2*i + 2``.

An :class:`Assertion` is the flat form of a nested implication
``g1 => g2 => ... => lhs = rhs``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import inference as I
from . import syntax as S
from .inference import TCon, TVar, TypeSchema, TypeTerm
from .syntax import Location


@dataclass(frozen=True, slots=True)
class Assertion:
    guards: tuple[int, ...]
    lhs: TypeTerm
    rhs: TypeTerm


@dataclass(frozen=True, slots=True)
class PDef:
    """``var <=> props & deps``: definition of a principal type correctness variable."""

    var: int
    props: tuple[int, ...]
    deps: tuple[int, ...]


@dataclass(frozen=True)
class ConstraintSchema:
    """``∀bound.(constraints ⇛ result)``."""

    bound: frozenset[int]
    constraints: tuple[Assertion, ...]
    result: int


def assertion_vars(a: Assertion, acc: set[int]) -> set[int]:
    I.free_vars(a.lhs, acc)
    I.free_vars(a.rhs, acc)
    return acc


# ---------------------------------------------------------------------------
# location index


@dataclass
class LocationIndex:
    program: S.Expr
    locs: list[Location]
    order: dict[Location, int]
    uloc: dict[Location, frozenset[Location]]
    dloc: dict[Location, Location]
    vloc: dict[Location, frozenset[Location]]
    typed_defs: frozenset[Location]
    frontier0: frozenset[Location]
    subtree: dict[Location, tuple[Location, ...]] = field(repr=False)

    def prop(self, loc: Location) -> int:
        return 2 * self.order[loc] + 1

    def pvar(self, loc: Location) -> int:
        return 2 * self.order[loc] + 2

    def var_name(self, v: int) -> str:
        loc = self.locs[(v - 1) // 2]
        return ("p" if v % 2 else "P") + "[" + ".".join(map(str, loc)) + "]"

    def decode(self, v: int) -> tuple[str, Location]:
        return ("prop" if v % 2 else "P"), self.locs[(v - 1) // 2]

    @property
    def usage_locs(self) -> frozenset[Location]:
        return frozenset(self.dloc)

    def full_expansion(self) -> frozenset[Location]:
        """The frontier plus every let usage; expanding further changes nothing."""
        return self.frontier0 | self.usage_locs


def build_index(p: S.Expr) -> LocationIndex:
    locs = S.locations(p)
    order = {l: i for i, l in enumerate(locs)}
    uloc: dict[Location, set[Location]] = {}
    dloc: dict[Location, Location] = {}
    typed: set[Location] = set()
    subtree: dict[Location, tuple[Location, ...]] = {}
    fresh = itertools.count(1)

    # scope: name -> def location (let) or None (lambda / builtin)
    def go(e: S.Expr, scope: Mapping[str, Optional[Location]], pi: Mapping[str, TypeSchema]) -> None:
        if isinstance(e, S.Var):
            d = scope.get(e.name)
            if d is not None:
                dloc[e.loc] = d
                uloc[d].add(e.loc)
        elif isinstance(e, S.Lam):
            sc, pe = dict(scope), dict(pi)
            for name in S.binder_names(e.param):
                sc[name] = None
                pe[name] = TypeSchema.mono(TVar(next(fresh)))
            go(e.body, sc, pe)
        elif isinstance(e, S.Let):
            d = e.defn.loc
            uloc.setdefault(d, set())
            go(e.defn, scope, pi)
            rho = I.principal(pi, e.defn)
            sc, pe = dict(scope), dict(pi)
            if rho is not None:
                typed.add(d)
            if e.name != S.WILDCARD:
                sc[e.name] = d
                if rho is not None:
                    pe[e.name] = rho
                else:
                    pe.pop(e.name, None)
            go(e.body, sc, pe)
        else:
            for k in e.children():
                go(k, scope, pi)

    go(p, {name: None for name in S.BUILTINS}, dict(I.BUILTIN_ENV))

    # subtree location lists, by pre-order contiguity
    sizes: dict[Location, int] = {}

    def count(e: S.Expr) -> int:
        n = 1 + sum(count(k) for k in e.children())
        sizes[e.loc] = n
        return n

    count(p)
    for d in uloc:
        i = order[d]
        subtree[d] = tuple(locs[i: i + sizes[d]])
    vloc = {d: frozenset(l for l in subtree[d] if l in dloc) for d in uloc}
    excluded = set()
    for d in typed:
        excluded.add(d)
        excluded |= uloc[d]
    return LocationIndex(
        program=p,
        locs=locs,
        order=order,
        uloc={d: frozenset(u) for d, u in uloc.items()},
        dloc=dloc,
        vloc=vloc,
        typed_defs=frozenset(typed),
        frontier0=frozenset(l for l in locs if l not in excluded),
        subtree=subtree,
    )


# ---------------------------------------------------------------------------
# constraint generation


@dataclass
class Generated:
    result: int
    assertions: list[Assertion]
    fresh_count: int
    used_principal: set[Location]


@dataclass(frozen=True)
class _PiEntry:
    rho: TypeSchema
    prin: Optional[ConstraintSchema]  # None for lambda-bound variables


def _rename(a: Assertion, ren: Mapping[int, TypeTerm], prefix: tuple[int, ...]) -> Assertion:
    return Assertion(prefix + a.guards, I.substitute(a.lhs, ren), I.substitute(a.rhs, ren))


class _Generator:
    def __init__(self, idx: LocationIndex, expanded: frozenset[Location], dup_opt: bool):
        self.idx = idx
        self.expanded = expanded
        self.dup_opt = dup_opt
        self.counter = itertools.count(1)
        self.used_principal: set[Location] = set()

    def new(self) -> int:
        return next(self.counter)

    def instance(self, sch: ConstraintSchema, prefix: tuple[int, ...]) -> tuple[int, list[Assertion]]:
        ren = {v: TVar(self.new()) for v in sorted(sch.bound)}
        res = ren.get(sch.result, TVar(sch.result))
        return res.id, [_rename(a, ren, prefix) for a in sch.constraints]

    def gen(self, e: S.Expr, pi: Mapping[str, _PiEntry], gamma: Mapping[str, ConstraintSchema],
            fv_gamma: frozenset[int]) -> tuple[int, list[Assertion]]:
        g = self.idx.prop(e.loc)
        pre = (g,)
        if isinstance(e, S.Hole):
            return self.new(), []
        if isinstance(e, (S.IntLit, S.BoolLit, S.StrLit)):
            a = self.new()
            con = I.INT if isinstance(e, S.IntLit) else I.BOOL if isinstance(e, S.BoolLit) else I.STRING
            return a, [Assertion(pre, TVar(a), con)]
        if isinstance(e, S.Var):
            entry = pi.get(e.name)
            if e.loc not in self.expanded and entry is not None and entry.prin is not None:
                sch = entry.prin
                self.used_principal.add(self.idx.dloc[e.loc])
            else:
                sch = gamma[e.name]
            gam = self.new()
            res, inst = self.instance(sch, pre)
            return gam, [Assertion(pre, TVar(gam), TVar(res))] + inst
        if isinstance(e, S.Lam):
            pi2, gamma2 = dict(pi), dict(gamma)
            names = (e.param,) if isinstance(e.param, str) else e.param
            parts = [self.new() for _ in names]
            out: list[Assertion] = []
            if isinstance(e.param, str):
                arg = parts[0]
            else:
                arg = self.new()
                out.append(Assertion(pre, TVar(arg), I.product(*map(TVar, parts))))
            for name, v in zip(names, parts):
                if name != S.WILDCARD:
                    pi2[name] = _PiEntry(TypeSchema.mono(TVar(v)), None)
                    gamma2[name] = ConstraintSchema(frozenset(), (), v)
            beta, phi = self.gen(e.body, pi2, gamma2, fv_gamma | frozenset(parts))
            gam = self.new()
            out.insert(0, Assertion(pre, TVar(gam), I.fun(TVar(arg), TVar(beta))))
            return gam, out + [_prefixed(a, g) for a in phi]
        if isinstance(e, S.App):
            a1, phi1 = self.gen(e.fn, pi, gamma, fv_gamma)
            a2, phi2 = self.gen(e.arg, pi, gamma, fv_gamma)
            gam = self.new()
            return gam, [Assertion(pre, TVar(a1), I.fun(TVar(a2), TVar(gam)))] + [
                _prefixed(a, g) for a in phi1 + phi2]
        if isinstance(e, S.If):
            kids = (e.cond, e.then, e.else_)
            results = [self.gen(k, pi, gamma, fv_gamma) for k in kids]
            gam = self.new()
            props = [self.idx.prop(k.loc) for k in kids]
            phi4 = [
                Assertion((g, props[0]), TVar(results[0][0]), I.BOOL),
                Assertion((g, props[1]), TVar(results[1][0]), TVar(gam)),
                Assertion((g, props[2]), TVar(results[2][0]), TVar(gam)),
            ]
            return gam, [_prefixed(a, g) for _, phi in results for a in phi] + phi4
        if isinstance(e, S.Tuple):
            results = [self.gen(k, pi, gamma, fv_gamma) for k in e.elements]
            gam = self.new()
            head = Assertion(pre, TVar(gam), I.product(*(TVar(r) for r, _ in results)))
            return gam, [head] + [_prefixed(a, g) for _, phi in results for a in phi]
        if isinstance(e, S.Let):
            return self.let(e, pi, gamma, fv_gamma)
        raise TypeError(e)

    def let(self, e: S.Let, pi, gamma, fv_gamma):
        g = self.idx.prop(e.loc)
        l1 = e.defn.loc
        a1, phi1 = self.gen(e.defn, pi, gamma, fv_gamma)
        fv_phi1: set[int] = {a1}
        for a in phi1:
            assertion_vars(a, fv_phi1)
        tau_exp = ConstraintSchema(frozenset(fv_phi1 - fv_gamma), tuple(phi1), a1)
        rho = I.principal({k: v.rho for k, v in pi.items()}, e.defn)
        # a definition rooted at a let usage can land in the expansion set without being ill-typed
        use_prin = rho is not None and (l1 not in self.expanded or l1 in self.idx.dloc)
        pi2, gamma2 = dict(pi), dict(gamma)
        if e.name != S.WILDCARD:
            gamma2[e.name] = tau_exp
            if use_prin:
                alpha = self.new()
                delta = {v: TVar(self.new()) for v in sorted(rho.bound)}
                body = I.substitute(rho.body, delta)
                prin = ConstraintSchema(
                    frozenset([alpha, *(t.id for t in delta.values())]),
                    (Assertion((self.idx.pvar(l1),), TVar(alpha), body),),
                    alpha,
                )
                pi2[e.name] = _PiEntry(rho, prin)
            else:
                pi2.pop(e.name, None)
        a2, phi2 = self.gen(e.body, pi2, gamma2, fv_gamma)
        gam = self.new()
        out = [Assertion((g,), TVar(gam), TVar(a2))]
        skip_extra = self.dup_opt and use_prin and not (fv_phi1 & fv_gamma)
        if not skip_extra:
            _, inst = self.instance(tau_exp, (g,))
            out += inst
        out += [_prefixed(a, g) for a in phi2]
        return gam, out


def _prefixed(a: Assertion, g: int) -> Assertion:
    return Assertion((g,) + a.guards, a.lhs, a.rhs)


def generate(p: S.Expr, expanded: Iterable[Location], *, index: Optional[LocationIndex] = None,
             dup_opt: bool = True) -> Generated:
    """Constraints of ``p`` where let usages outside ``expanded`` use principal types."""
    idx = index or build_index(p)
    gen = _Generator(idx, frozenset(expanded), dup_opt)
    pi = {k: _PiEntry(v, None) for k, v in I.BUILTIN_ENV.items()}
    gamma = {}
    for name, sch in I.BUILTIN_ENV.items():
        r = gen.new()
        gamma[name] = ConstraintSchema(frozenset([r]), (Assertion((), TVar(r), sch.body),), r)
    result, phi = gen.gen(p, pi, gamma, frozenset())
    return Generated(result, phi, next(gen.counter) - 1, gen.used_principal)


def pdefs(p: S.Expr, idx: Optional[LocationIndex] = None) -> list[PDef]:
    idx = idx or build_index(p)
    out = []
    for d in sorted(idx.uloc):
        props = tuple(idx.prop(l) for l in idx.subtree[d])
        deps = tuple(sorted({idx.pvar(idx.dloc[u]) for u in idx.vloc[d]}))
        out.append(PDef(idx.pvar(d), props, deps))
    return out


# ---------------------------------------------------------------------------
# instances


@dataclass
class Instance:
    """Weighted partial MaxSMT instance: hard assertions, PDefs and forced props; soft props."""

    assertions: list[Assertion]
    pdefs: list[PDef]
    hard_units: list[int]
    soft: list[tuple[int, int]]
    names: dict[int, str] = field(default_factory=dict)
    index: Optional[LocationIndex] = field(default=None, repr=False)

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.soft)

    def var_name(self, v: int) -> str:
        if v in self.names:
            return self.names[v]
        if self.index is not None:
            return self.index.var_name(v)
        return f"v{v}"


def build_instance(p: S.Expr, cost: S.CostFunction, expanded: Iterable[Location], *,
                   index: Optional[LocationIndex] = None, dup_opt: bool = True) -> Instance:
    idx = index or build_index(p)
    generated = generate(p, expanded, index=idx, dup_opt=dup_opt)
    soft = [(idx.prop(l), cost.weights[l]) for l in idx.locs if l in cost.weights]
    hard = [idx.prop(l) for l in idx.locs if l not in cost.weights]
    return Instance(generated.assertions, pdefs(p, idx), hard, soft, index=idx)


# ---------------------------------------------------------------------------
# text format

FORMAT_HEADER = "c minerror-instance 1"


def emit_instance(inst: Instance) -> str:
    """Line-oriented dump.

    ::

        [w=3] p[1.0]                      soft location variable with weight 3
        [hard] p[1.1]                     location variable forced true
        P[0] <=> p[0] & p[0.0] & P[1]     principal type correctness definition
        p[] & p[1] & P[0] => t3 = (fun t4 int)
    """
    name = inst.var_name
    lines = [FORMAT_HEADER]
    lines += [f"[w={w}] {name(v)}" for v, w in inst.soft]
    lines += [f"[hard] {name(v)}" for v in inst.hard_units]
    for d in inst.pdefs:
        rhs = " & ".join(name(v) for v in d.props + d.deps) or "true"
        lines.append(f"{name(d.var)} <=> {rhs}")
    for a in inst.assertions:
        guards = " & ".join(name(v) for v in a.guards)
        lines.append(f"{guards} => {a.lhs} = {a.rhs}" if guards else f"=> {a.lhs} = {a.rhs}")
    return "\n".join(lines) + "\n"


_VAR = re.compile(r"[A-Za-z]\[[0-9.]*\]|v\d+")


def read_instance(text: str) -> Instance:
    """Parse the output of :func:`emit_instance`.  Variable numbers are reassigned."""
    ids: dict[str, int] = {}

    def var(tok: str) -> int:
        tok = tok.strip()
        if not _VAR.fullmatch(tok):
            raise ValueError(f"bad variable {tok!r}")
        if tok not in ids:
            ids[tok] = len(ids) + 1
        return ids[tok]

    soft, hard, defs, asserts = [], [], [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            if m := re.fullmatch(r"\[w=(\d+)\]\s+(\S+)", line):
                soft.append((var(m.group(2)), int(m.group(1))))
            elif m := re.fullmatch(r"\[hard\]\s+(\S+)", line):
                hard.append(var(m.group(1)))
            elif "<=>" in line:
                lhs, rhs = line.split("<=>")
                names = [] if rhs.strip() == "true" else [t for t in rhs.split("&")]
                vs = [var(t) for t in names]
                props = tuple(v for t, v in zip(names, vs) if t.strip().startswith("p"))
                deps = tuple(v for t, v in zip(names, vs) if not t.strip().startswith("p"))
                defs.append(PDef(var(lhs), props, deps))
            elif "=>" in line:
                lhs, eq = line.split("=>")
                guards = tuple(var(t) for t in lhs.split("&")) if lhs.strip() else ()
                left, right = eq.split("=")
                asserts.append(Assertion(guards, I.parse_type(left), I.parse_type(right)))
            else:
                raise ValueError("unrecognised line")
        except ValueError as exc:
            raise ValueError(f"line {n}: {exc}") from None
    names = {v: k for k, v in ids.items()}
    return Instance(asserts, defs, hard, soft, names=names)
