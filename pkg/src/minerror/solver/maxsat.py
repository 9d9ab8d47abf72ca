"""Weighted partial MaxSMT.

An instance is a list of hard clauses over positive integer variables, a
table binding some of those variables to type equalities, and soft unit
variables with positive weights.  Atom variables are expected to occur only
positively in hard clauses (a false atom is "not asserted").

``wpmaxsmt`` is core-guided weighted MaxRes over :class:`SmtSolver`;
``oracle_wpmaxsmt`` enumerates falsified-soft sets by increasing penalty and
checks each with a separate backtracking search and the inference unifier.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .. import inference as I
from ..inference import TypeTerm
from .smt import SmtSolver

Atoms = Mapping[int, tuple[TypeTerm, TypeTerm]]

ORACLE_MAX_SOFT = 24


class HardUnsatisfiable(Exception):
    """The hard clauses have no model."""


class InstanceTooLarge(ValueError):
    pass


@dataclass
class Model:
    booleans: dict[int, bool]
    types: dict[int, TypeTerm]

    def __getitem__(self, v: int) -> bool:
        return self.booleans.get(v, False)


@dataclass
class SolveResult:
    model: Model
    achieved_weight: int
    penalty: int
    stats: dict[str, int] = field(default_factory=dict)


def _merge_soft(soft: Sequence[tuple[int, int]]) -> dict[int, int]:
    out: dict[int, int] = {}
    for v, w in soft:
        if v <= 0 or w <= 0:
            raise ValueError("soft units are positive variables with positive weights")
        out[v] = out.get(v, 0) + w
    return out


def _type_vars(atoms: Atoms) -> list[int]:
    vs: set[int] = set()
    for lhs, rhs in atoms.values():
        I.free_vars(lhs, vs)
        I.free_vars(rhs, vs)
    return sorted(vs)


class MaxResSolver:
    """Incremental weighted MaxRes.  Build once, then call :meth:`optimize`."""

    def __init__(self, hard: Sequence[Sequence[int]], soft: Sequence[tuple[int, int]],
                 atoms: Atoms = {}, *, nvars: int = 0, shrink_cores: bool = True):
        self.smt = SmtSolver()
        top = max([nvars, *(abs(x) for c in hard for x in c), *(v for v, _ in soft), *atoms], default=0)
        self.smt.ensure_vars(top)
        self.nvars = top
        self.atoms = dict(atoms)
        for v, (lhs, rhs) in atoms.items():
            self.smt.bind_atom(v, lhs, rhs)
        for c in hard:
            self.smt.add_clause(c)
        self.soft = _merge_soft(soft)
        self.weights = dict(self.soft)  # residual weights, including relaxation variables
        self.shrink_cores = shrink_cores
        self.lower_bound = 0
        self.rounds = 0
        self.optimized = False

    def assert_guarded(self, guards: Sequence[int], lhs: TypeTerm, rhs: TypeTerm) -> int:
        """Hard ``guards => lhs = rhs`` with a solver-allocated atom variable."""
        return self.smt.add_guarded_atom(guards, lhs, rhs)

    def _assumptions(self) -> list[int]:
        return [v for v, w in self.weights.items() if w > 0]

    def _shrink(self, core: list[int]) -> list[int]:
        """Deletion-based reduction of a soft core to an irreducible one."""
        core = list(core)
        i = 0
        while i < len(core):
            trial = core[:i] + core[i + 1:]
            if not self.smt.solve(trial):
                kept = set(self.smt.core)
                core = [x for x in trial if x in kept]
            else:
                i += 1
        return core

    def optimize(self) -> int:
        smt = self.smt
        if not smt.solve():
            raise HardUnsatisfiable("hard clauses are unsatisfiable")
        while not smt.solve(self._assumptions()):
            core = smt.core
            if not core:
                raise HardUnsatisfiable("hard clauses are unsatisfiable")
            if self.shrink_cores and len(core) > 1:
                core = self._shrink(core)
            self.rounds += 1
            wmin = min(self.weights[c] for c in core)
            self.lower_bound += wmin
            for c in core:
                self.weights[c] -= wmin
            # replace the core by softs r_i = c_i | (c_{i+1} & ... & c_k)
            tail = core[-1]
            for i in range(len(core) - 2, -1, -1):
                r = smt.new_var(phase=True)
                smt.add_iff_or(r, [core[i], tail])
                self.weights[r] = wmin
                if i > 0:
                    d = smt.new_var(phase=True)
                    smt.add_iff_and(d, [core[i], tail])
                    tail = d
        self.optimized = True
        return self.lower_bound

    def prefer(self, literals: Sequence[int]) -> None:
        """Among optimal models, greedily satisfy ``literals`` in the given order."""
        if not self.optimized:
            self.optimize()
        smt = self.smt
        base = self._assumptions()
        forced = set(base)
        accepted: list[int] = []
        for lit in literals:
            if -lit in forced:
                continue
            if smt.value(lit):
                accepted.append(lit)
            elif smt.solve(base + accepted + [lit]):
                accepted.append(lit)
        # leave the solver holding a model of every accepted preference
        if not smt.solve(base + accepted):
            raise AssertionError("preference pass lost its model")

    def result(self) -> SolveResult:
        smt = self.smt
        booleans = {v: smt.model[v] for v in range(1, self.nvars + 1)}
        types = smt.type_solution(_type_vars(smt.atom_terms))
        total = sum(self.soft.values())
        penalty = sum(w for v, w in self.soft.items() if not booleans[v])
        if penalty != self.lower_bound:
            raise AssertionError(f"model penalty {penalty} differs from bound {self.lower_bound}")
        st = smt.stats
        stats = {
            "maxres_rounds": self.rounds,
            "sat_calls": st.sat_calls,
            "theory_checks": st.theory_checks,
            "theory_lemmas": st.theory_lemmas,
            "conflicts": st.conflicts,
            "decisions": st.decisions,
        }
        return SolveResult(Model(booleans, types), total - penalty, penalty, stats)


def wpmaxsmt(hard: Sequence[Sequence[int]], soft: Sequence[tuple[int, int]], atoms: Atoms = {},
             *, prefer: Sequence[int] = (), nvars: int = 0) -> SolveResult:
    """Maximize the weight of true soft variables subject to ``hard`` modulo the theory.

    Raises :class:`HardUnsatisfiable` if the hard part alone has no model.
    """
    s = MaxResSolver(hard, soft, atoms, nvars=nvars)
    s.optimize()
    s.prefer(prefer)
    return s.result()


# ---------------------------------------------------------------------------
# oracle


def _feasible(clauses: list[list[int]], atoms: Atoms, nvars: int,
              forced: Sequence[int]) -> Optional[dict[int, bool]]:
    """Plain backtracking search with unit propagation and eager unification of true atoms."""
    assign: dict[int, bool] = {}

    def lit_val(x: int) -> Optional[bool]:
        b = assign.get(abs(x))
        return None if b is None else (b if x > 0 else not b)

    def consistent() -> bool:
        s: dict[int, TypeTerm] = {}
        for v, (lhs, rhs) in atoms.items():
            if assign.get(v):
                try:
                    s = I.unify(lhs, rhs, s)
                except I.UnifyError:
                    return False
        return True

    def propagate() -> Optional[list[int]]:
        trail = []
        changed = True
        while changed:
            changed = False
            for c in clauses:
                free = None
                n_free = 0
                for x in c:
                    b = lit_val(x)
                    if b:
                        break
                    if b is None:
                        n_free += 1
                        free = x
                else:
                    if n_free == 0:
                        for v in trail:
                            del assign[v]
                        return None
                    if n_free == 1:
                        assign[abs(free)] = free > 0
                        trail.append(abs(free))
                        changed = True
        return trail

    def search(v: int) -> bool:
        trail = propagate()
        if trail is None:
            return False
        if not consistent():
            for u in trail:
                del assign[u]
            return False
        while v <= nvars and v in assign:
            v += 1
        if v > nvars:
            return True
        for b in (False, True):
            assign[v] = b
            if search(v + 1):
                return True
            del assign[v]
        for u in trail:
            del assign[u]
        return False

    for x in forced:
        if lit_val(x) is False:
            return None
        assign[abs(x)] = x > 0
    if search(1):
        return {v: assign.get(v, False) for v in range(1, nvars + 1)}
    return None


def oracle_wpmaxsmt(hard: Sequence[Sequence[int]], soft: Sequence[tuple[int, int]],
                    atoms: Atoms = {}, *, nvars: int = 0) -> SolveResult:
    """Exhaustive optimum: try falsified soft sets in order of increasing penalty."""
    weights = _merge_soft(soft)
    if len(weights) > ORACLE_MAX_SOFT:
        raise InstanceTooLarge(f"{len(weights)} soft variables (limit {ORACLE_MAX_SOFT})")
    top = max([nvars, *(abs(x) for c in hard for x in c), *weights, *atoms], default=0)
    clauses = [list(c) for c in hard]
    # heaviest first, so ties in penalty try dropping heavy variables last
    order = sorted(weights, key=lambda v: (weights[v], v))
    ws = [weights[v] for v in order]
    total = sum(ws)
    # standard enumeration of subsets by nondecreasing sum over sorted weights
    heap: list[tuple[int, tuple[int, ...]]] = [(0, ())]
    while heap:
        pen, idxs = heapq.heappop(heap)
        dropped = {order[i] for i in idxs}
        forced = [v for v in order if v not in dropped]
        sol = _feasible(clauses, atoms, top, forced)
        if sol is not None:
            penalty = sum(weights[v] for v in weights if not sol[v])
            types = _ground(atoms, sol)
            return SolveResult(Model(sol, types), total - penalty, penalty)
        last = idxs[-1] if idxs else -1
        if last + 1 < len(ws):
            heapq.heappush(heap, (pen + ws[last + 1], idxs + (last + 1,)))
            if idxs:
                heapq.heappush(heap, (pen - ws[last] + ws[last + 1], idxs[:-1] + (last + 1,)))
    raise HardUnsatisfiable("hard clauses are unsatisfiable")


def _ground(atoms: Atoms, sol: Mapping[int, bool]) -> dict[int, TypeTerm]:
    s: dict[int, TypeTerm] = {}
    for v, (lhs, rhs) in atoms.items():
        if sol.get(v):
            s = I.unify(lhs, rhs, s)
    out = {}
    for tv in _type_vars(atoms):
        t = I.apply(s, I.TVar(tv))
        g = {u: I.INT for u in I.free_vars(t)}
        out[tv] = I.substitute(t, g)
    return out
