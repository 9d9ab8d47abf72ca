"""Lazy offline DPLL(T): the SAT solver enumerates propositional models and the
unification theory refutes them with irreducible cores.

A theory atom that is false in a model is simply not asserted; no
disequality is imposed.  This matches the usual semantics whenever atoms occur
only positively in the input clauses, which is the case for every instance
built from typing constraints.  Atoms start with phase false so the search
asserts as few equalities as it can.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..inference import TypeTerm
from . import theory as T
from .sat import SatSolver


@dataclass
class SmtStats:
    sat_calls: int = 0
    theory_checks: int = 0
    theory_lemmas: int = 0
    conflicts: int = 0
    decisions: int = 0


class SmtSolver:
    def __init__(self):
        self.sat = SatSolver()
        self.store = T.TermStore()
        self.atom_eq: dict[int, tuple[int, int]] = {}  # atom var -> interned (lhs, rhs)
        self.atom_terms: dict[int, tuple[TypeTerm, TypeTerm]] = {}
        self._atom_of: dict[tuple[int, int], int] = {}
        self.stats = SmtStats()
        self.model: list[bool] = []
        self.true_atoms: list[int] = []
        self.core: list[int] = []

    # -- building ------------------------------------------------------------

    def new_var(self, phase: bool = False) -> int:
        return self.sat.new_var(phase=phase)

    def ensure_vars(self, n: int) -> None:
        self.sat.ensure_vars(n)

    def add_clause(self, lits: Iterable[int]) -> bool:
        return self.sat.add_clause(lits)

    def atom(self, lhs: TypeTerm, rhs: TypeTerm) -> int:
        """Boolean variable standing for ``lhs = rhs`` (shared between equal atoms)."""
        a, b = self.store.intern(lhs), self.store.intern(rhs)
        key = (a, b) if a <= b else (b, a)
        v = self._atom_of.get(key)
        if v is None:
            v = self.sat.new_var(phase=False)
            self._atom_of[key] = v
            self.atom_eq[v] = (a, b)
            self.atom_terms[v] = (lhs, rhs)
        return v

    def bind_atom(self, v: int, lhs: TypeTerm, rhs: TypeTerm) -> None:
        """Make the existing variable ``v`` stand for ``lhs = rhs``."""
        self.sat.ensure_vars(v)
        self.sat.phase[v] = False
        self.atom_eq[v] = (self.store.intern(lhs), self.store.intern(rhs))
        self.atom_terms[v] = (lhs, rhs)

    def add_guarded_atom(self, guards: Sequence[int], lhs: TypeTerm, rhs: TypeTerm) -> int:
        """Assert ``guards => lhs = rhs``."""
        v = self.atom(lhs, rhs)
        self.add_clause([-g for g in guards] + [v])
        return v

    def add_iff_and(self, out: int, conj: Sequence[int]) -> None:
        """``out <=> conj[0] & conj[1] & ...``"""
        for x in conj:
            self.add_clause([-out, x])
        self.add_clause([out] + [-x for x in conj])

    def add_iff_or(self, out: int, disj: Sequence[int]) -> None:
        for x in disj:
            self.add_clause([out, -x])
        self.add_clause([-out] + list(disj))

    # -- solving ---------------------------------------------------------------

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Satisfiability modulo the theory.  On failure ``core`` holds failed assumptions."""
        sat = self.sat
        while True:
            self.stats.sat_calls += 1
            ok = sat.solve(assumptions)
            self.stats.conflicts = sat.conflicts
            self.stats.decisions = sat.decisions
            if not ok:
                self.core = list(sat.core)
                return False
            model = sat.model
            atoms = [v for v in self.atom_eq if model[v]]
            self.stats.theory_checks += 1
            eqs = [self.atom_eq[v] for v in atoms]
            if self.store.graph.first_failure(T._pairs(eqs)) < 0:
                self.model = model
                self.true_atoms = atoms
                return True
            core = T.minimal_core(self.store, eqs, atoms)
            self.stats.theory_lemmas += 1
            if not sat.add_clause([-v for v in core]):
                self.core = []
                return False

    def value(self, x: int) -> bool:
        return self.model[x] if x > 0 else not self.model[-x]

    def type_solution(self, variables: Iterable[int], default: TypeTerm = T.I.INT) -> dict[int, TypeTerm]:
        """Ground types for type variables consistent with the last model."""
        eqs = [self.atom_eq[v] for v in self.true_atoms]
        return T.solution(self.store, eqs, variables, default)
