"""Located abstract syntax for the mini-ML language.

Every node carries a ``loc``: the path of child indices from the program root.
Children are numbered in source order::

    Lam      body=0
    App      fn=0, arg=1
    If       cond=0, then=1, else=2
    Let      defn=0, body=1
    Tuple    elements 0..n-1

Locations are plain tuples, so Python's tuple ordering gives the
lexicographic order used for tie-breaking, and a prefix sorts before its
extensions.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

Location = tuple[int, ...]

ROOT: Location = ()

# name -> monotype in s-expression form; parsed by the inference module
BUILTINS: dict[str, str] = {
    "+": "(fun int (fun int int))",
    "int_of_string": "(fun string int)",
}


class SyntaxError_(Exception):
    """Raised on malformed source text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class UnboundVariable(Exception):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(f"{line}:{col}: unbound variable {name!r}")
        self.name = name
        self.line = line
        self.col = col


class InvalidLocation(KeyError):
    pass


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int


NO_SPAN = Span(0, 0, 0, 0)


@dataclass(frozen=True)
class Node:
    loc: Location = field(default=ROOT, compare=False, kw_only=True)
    span: Span = field(default=NO_SPAN, compare=False, repr=False, kw_only=True)

    def children(self) -> tuple["Expr", ...]:
        return ()

    def with_children(self, kids: tuple["Expr", ...]) -> "Expr":
        return self  # type: ignore[return-value]


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class StrLit(Node):
    value: str


@dataclass(frozen=True)
class Hole(Node):
    pass


@dataclass(frozen=True)
class Lam(Node):
    """``fun x -> body``; a tuple ``param`` is the binder ``fun (a, b, _) -> body``."""

    param: Union[str, tuple[str, ...]]
    body: "Expr"

    def children(self):
        return (self.body,)

    def with_children(self, kids):
        return dataclasses.replace(self, body=kids[0])


@dataclass(frozen=True)
class App(Node):
    fn: "Expr"
    arg: "Expr"

    def children(self):
        return (self.fn, self.arg)

    def with_children(self, kids):
        return dataclasses.replace(self, fn=kids[0], arg=kids[1])


@dataclass(frozen=True)
class If(Node):
    cond: "Expr"
    then: "Expr"
    else_: "Expr"

    def children(self):
        return (self.cond, self.then, self.else_)

    def with_children(self, kids):
        return dataclasses.replace(self, cond=kids[0], then=kids[1], else_=kids[2])


@dataclass(frozen=True)
class Let(Node):
    name: str
    defn: "Expr"
    body: "Expr"

    def children(self):
        return (self.defn, self.body)

    def with_children(self, kids):
        return dataclasses.replace(self, defn=kids[0], body=kids[1])


@dataclass(frozen=True)
class Tuple(Node):
    elements: tuple["Expr", ...]

    def __post_init__(self):
        if len(self.elements) not in (2, 3):
            raise ValueError("tuples have arity 2 or 3")

    def children(self):
        return self.elements

    def with_children(self, kids):
        return dataclasses.replace(self, elements=tuple(kids))


Expr = Union[Var, IntLit, BoolLit, StrLit, Hole, Lam, App, If, Let, Tuple]

WILDCARD = "_"


def binder_names(param: Union[str, tuple[str, ...]]) -> tuple[str, ...]:
    names = (param,) if isinstance(param, str) else param
    return tuple(n for n in names if n != WILDCARD)


# ---------------------------------------------------------------------------
# locations


def relocate(e: Expr, loc: Location = ROOT) -> Expr:
    """Return a copy of ``e`` whose nodes carry paths rooted at ``loc``."""
    kids = e.children()
    if kids:
        kids = tuple(relocate(k, loc + (i,)) for i, k in enumerate(kids))
        e = e.with_children(kids)
    return dataclasses.replace(e, loc=loc)


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal, which visits locations in lexicographic order."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def locations(p: Expr) -> list[Location]:
    """All locations of ``p``, sorted."""
    return [n.loc for n in walk(p)]


def size(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def subexpr(p: Expr, loc: Location) -> Expr:
    node = p
    rel = loc[len(p.loc):] if loc[: len(p.loc)] == p.loc else None
    if rel is None:
        raise InvalidLocation(loc)
    for i in rel:
        kids = node.children()
        if not 0 <= i < len(kids):
            raise InvalidLocation(loc)
        node = kids[i]
    return node


def is_prefix(a: Location, b: Location) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def antichain(locs: Iterable[Location]) -> set[Location]:
    """Drop every location that has a proper prefix in ``locs``."""
    out: set[Location] = set()
    for loc in sorted(set(locs)):
        if not any(loc[:k] in out for k in range(len(loc))):
            out.add(loc)
    return out


def mask(p: Expr, locs: Iterable[Location]) -> Expr:
    """Replace the subtree at every location in ``locs`` by a hole."""
    targets = set(locs)
    for loc in targets:
        subexpr(p, loc)
    if not targets:
        return p

    def go(e: Expr) -> Expr:
        if e.loc in targets:
            return Hole(loc=e.loc, span=e.span)
        kids = e.children()
        if not kids or not any(is_prefix(e.loc, t) for t in targets):
            return e
        return e.with_children(tuple(go(k) for k in kids))

    return go(p)


# ---------------------------------------------------------------------------
# cost functions


@dataclass(frozen=True)
class CostFunction:
    """Partial map from locations to positive weights; missing locations are hard."""

    weights: Mapping[Location, int]

    def __post_init__(self):
        if ROOT not in self.weights:
            raise ValueError("the root location must be soft")
        if any(w < 1 for w in self.weights.values()):
            raise ValueError("weights must be positive")

    def __call__(self, locs: Iterable[Location]) -> int:
        return sum(self.weights.get(l, 0) for l in locs)

    def is_soft(self, loc: Location) -> bool:
        return loc in self.weights


def builtin_usages(p: Expr) -> set[Location]:
    """Locations of variables that resolve to a builtin rather than a binder."""
    out: set[Location] = set()

    def go(e: Expr, bound: frozenset[str]) -> None:
        if isinstance(e, Var):
            if e.name not in bound:
                out.add(e.loc)
        elif isinstance(e, Lam):
            go(e.body, bound | set(binder_names(e.param)))
        elif isinstance(e, Let):
            go(e.defn, bound)
            go(e.body, bound | {e.name} if e.name != WILDCARD else bound)
        else:
            for k in e.children():
                go(k, bound)

    go(p, frozenset())
    return out


def ast_size_cost(p: Expr, *, hard_builtins: bool = False) -> CostFunction:
    """Weight every location by the node count of its subtree."""
    sizes: dict[Location, int] = {}

    def go(e: Expr) -> int:
        n = 1 + sum(go(k) for k in e.children())
        sizes[e.loc] = n
        return n

    go(p)
    if hard_builtins:
        for loc in builtin_usages(p):
            if loc != p.loc:
                sizes.pop(loc, None)
    return CostFunction(sizes)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\(\*)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>->|[()+,=?])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"let", "in", "fun", "if", "then", "else", "true", "false"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, col = 0, 1, 1

    def advance(chunk: str) -> None:
        nonlocal line, col
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "comment":
            depth, j = 1, pos + 2
            while depth and j < len(text):
                if text.startswith("(*", j):
                    depth, j = depth + 1, j + 2
                elif text.startswith("*)", j):
                    depth, j = depth - 1, j + 2
                else:
                    j += 1
            if depth:
                raise SyntaxError_("unterminated comment", line, col)
            advance(text[pos:j])
            pos = j
            continue
        chunk = m.group()
        if kind != "ws":
            if kind == "ident" and chunk in _KEYWORDS:
                kind = chunk
            elif kind == "op":
                kind = chunk
            start_line, start_col = line, col
            advance(chunk)
            toks.append(_Tok(kind, chunk, start_line, start_col, line, col))
        else:
            advance(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col, line, col))
    return toks


def _unescape(lit: str) -> str:
    body = lit[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        # inside a top-level definition a token in column 1 starts the next item
        self.offside = False

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            shown = t.text or "end of input"
            raise SyntaxError_(f"expected {kind!r}, found {shown!r}", t.line, t.col)
        return self.next()

    def span(self, start: _Tok) -> Span:
        last = self.toks[self.i - 1]
        return Span(start.line, start.col, last.end_line, last.end_col)

    # program := ('let' binding ['in' expr])* expr
    def program(self) -> Expr:
        e = self.expr(top=True)
        if self.tok.kind != "eof":
            t = self.tok
            raise SyntaxError_(f"unexpected {t.text!r}", t.line, t.col)
        return e

    def expr(self, top: bool = False) -> Expr:
        t = self.tok
        if t.kind == "let":
            return self.let(top)
        if t.kind == "fun":
            self.next()
            params = [self.pattern()]
            while self.tok.kind != "->":
                params.append(self.pattern())
            self.expect("->")
            body = self.expr()
            sp = self.span(t)
            for prm in reversed(params):
                body = Lam(prm, body, span=sp)
            return body
        if t.kind == "if":
            self.next()
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return If(c, a, b, span=self.span(t))
        return self.infix()

    def let(self, top: bool) -> Expr:
        start = self.expect("let")
        name_tok = self.tok
        if name_tok.kind not in ("ident",):
            raise SyntaxError_("expected a name after 'let'", name_tok.line, name_tok.col)
        name = self.next().text
        params = []
        while self.tok.kind != "=":
            params.append(self.pattern())
        self.expect("=")
        saved, self.offside = self.offside, top
        defn = self.expr()
        self.offside = saved
        if params:
            sp = Span(start.line, start.col, defn.span.end_line, defn.span.end_col)
            for prm in reversed(params):
                defn = Lam(prm, defn, span=sp)
        if self.tok.kind == "in":
            self.next()
        elif not top:
            t = self.tok
            raise SyntaxError_("expected 'in'", t.line, t.col)
        if top and self.tok.kind == "eof":
            t = self.tok
            raise SyntaxError_("program ends without a final expression", t.line, t.col)
        body = self.expr(top=top)
        return Let(name, defn, body, span=self.span(start))

    def pattern(self) -> Union[str, tuple[str, ...]]:
        t = self.tok
        if t.kind == "ident":
            return self.next().text
        if t.kind == "(":
            self.next()
            names = [self.expect("ident").text]
            while self.tok.kind == ",":
                self.next()
                names.append(self.expect("ident").text)
            self.expect(")")
            if len(names) not in (2, 3):
                raise SyntaxError_("tuple patterns have 2 or 3 components", t.line, t.col)
            return tuple(names)
        raise SyntaxError_(f"expected a parameter, found {t.text!r}", t.line, t.col)

    def infix(self) -> Expr:
        start = self.tok
        lhs = self.application()
        while self.tok.kind == "+" and not self._offside():
            op = self.next()
            rhs = self.application()
            plus = Var("+", span=Span(op.line, op.col, op.end_line, op.end_col))
            lhs = App(App(plus, lhs, span=self.span(start)), rhs, span=self.span(start))
        return lhs

    def _offside(self) -> bool:
        return self.offside and self.tok.col == 1 and self.toks[self.i - 1].end_line < self.tok.line

    def _starts_atom(self) -> bool:
        if self._offside():
            return False
        return self.tok.kind in ("ident", "int", "str", "true", "false", "?", "(")

    def application(self) -> Expr:
        start = self.tok
        e = self.atom()
        while self._starts_atom():
            arg = self.atom()
            e = App(e, arg, span=self.span(start))
        return e

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "ident":
            self.next()
            return Var(t.text, span=self.span(t))
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text), span=self.span(t))
        if t.kind == "str":
            self.next()
            return StrLit(_unescape(t.text), span=self.span(t))
        if t.kind in ("true", "false"):
            self.next()
            return BoolLit(t.kind == "true", span=self.span(t))
        if t.kind == "?":
            self.next()
            return Hole(span=self.span(t))
        if t.kind == "(":
            self.next()
            if self.tok.kind == "+":
                # (+) as a prefix operator
                self.next()
                self.expect(")")
                return Var("+", span=self.span(t))
            items = [self.expr()]
            while self.tok.kind == ",":
                self.next()
                items.append(self.expr())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            if len(items) > 3:
                raise SyntaxError_("tuples have 2 or 3 components", t.line, t.col)
            return Tuple(tuple(items), span=self.span(t))
        shown = t.text or "end of input"
        raise SyntaxError_(f"unexpected {shown!r}", t.line, t.col)


def check_closed(p: Expr, builtins: Iterable[str] = BUILTINS) -> None:
    """Raise :class:`UnboundVariable` if ``p`` has a free variable."""

    def go(e: Expr, bound: frozenset[str]) -> None:
        if isinstance(e, Var):
            if e.name not in bound or e.name == WILDCARD:
                raise UnboundVariable(e.name, e.span.line, e.span.col)
        elif isinstance(e, Lam):
            go(e.body, bound | set(binder_names(e.param)))
        elif isinstance(e, Let):
            go(e.defn, bound)
            go(e.body, bound | {e.name})
        else:
            for k in e.children():
                go(k, bound)

    go(p, frozenset(builtins))


def parse(text: str, *, check: bool = True) -> Expr:
    """Parse a program and assign locations. Raises on free variables unless ``check`` is off."""
    p = relocate(_Parser(text).program())
    if check:
        check_closed(p)
    return p


# ---------------------------------------------------------------------------
# printing


def _param(prm: Union[str, tuple[str, ...]]) -> str:
    return prm if isinstance(prm, str) else "(" + ", ".join(prm) + ")"


def _is_plus(e: Expr) -> bool:
    return isinstance(e, App) and isinstance(e.fn, App) and e.fn.fn == Var("+")


def pretty(e: Expr) -> str:
    """Canonical single-line rendering; ``parse(pretty(e)) == e``."""
    return _pp(e, 0)


# precedence: 0 open (let/fun/if), 1 infix +, 2 application, 3 atom
def _pp(e: Expr, prec: int) -> str:
    if isinstance(e, Var):
        return "(+)" if e.name == "+" else e.name
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, StrLit):
        return '"' + e.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(e, Hole):
        return "?"
    if isinstance(e, Tuple):
        return "(" + ", ".join(_pp(x, 0) for x in e.elements) + ")"
    if _is_plus(e):
        s = f"{_pp(e.fn.arg, 1)} + {_pp(e.arg, 2)}"
        return s if prec <= 1 else f"({s})"
    if isinstance(e, App):
        s = f"{_pp(e.fn, 2)} {_pp(e.arg, 3)}"
        return s if prec <= 2 else f"({s})"
    if isinstance(e, Lam):
        s = f"fun {_param(e.param)} -> {_pp(e.body, 0)}"
    elif isinstance(e, If):
        s = f"if {_pp(e.cond, 0)} then {_pp(e.then, 0)} else {_pp(e.else_, 0)}"
    elif isinstance(e, Let):
        s = f"let {e.name} = {_pp(e.defn, 0)} in {_pp(e.body, 0)}"
    else:
        raise TypeError(e)
    return s if prec == 0 else f"({s})"
