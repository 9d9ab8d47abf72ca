"""CDCL SAT solver with assumptions and final-conflict cores.

Variables are positive ints, literals signed ints (DIMACS style) at the API.
Internally literal ``2*v`` is v true and ``2*v + 1`` is v false.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class SatSolver:
    def __init__(self):
        self.nvars = 0
        self.val: list[int] = [0, 0]  # per internal literal: 1 true, -1 false, 0 unassigned
        self.level: list[int] = [0]
        self.reason: list[Optional[list[int]]] = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [True]
        self.decidable: list[bool] = [False]
        self.watches: list[list[list[int]]] = [[], []]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.learnts: list[list[int]] = []
        self.model: list[bool] = []
        self.core: list[int] = []
        self._assume_ext: list[int] = []
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0

    # -- construction -----------------------------------------------------

    def new_var(self, phase: bool = True, decide: bool = True) -> int:
        self.nvars += 1
        v = self.nvars
        self.val += [0, 0]
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(phase)
        self.decidable.append(decide)
        self.watches += [[], []]
        if decide:
            heapq.heappush(self.heap, (0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else -2 * x + 1

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause at decision level 0.  Returns False once the formula is unsat."""
        if not self.ok:
            return False
        self._cancel_until(0)
        seen: set[int] = set()
        clause: list[int] = []
        for x in lits:
            if abs(x) > self.nvars:
                self.ensure_vars(abs(x))
            l = self._lit(x)
            if l ^ 1 in seen or self.val[l] == 1:
                return True  # tautology or satisfied at level 0
            if l in seen or self.val[l] == -1:
                continue
            seen.add(l)
            clause.append(l)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(clause)
        return True

    def _attach(self, c: list[int]) -> None:
        self.watches[c[0]].append(c)
        self.watches[c[1]].append(c)

    # -- core loop ----------------------------------------------------------

    def _enqueue(self, lit: int, reason: Optional[list[int]]) -> None:
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> Optional[list[int]]:
        val = self.val
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1)
                         if self.decidable[u] and self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.decidable[v]:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        path = 0
        p = -1
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level = self.level
        while True:
            start = 0 if p == -1 else 1
            for q in confl[start:]:
                v = q >> 1
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while (self.trail[idx] >> 1) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            seen.discard(p >> 1)
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        keep = [learnt[0]]
        marks = {l >> 1 for l in learnt}
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r is None or any((x >> 1) not in marks and level[x >> 1] > 0 for x in r[1:]):
                keep.append(q)
        learnt = keep
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_final(self, p: int) -> list[int]:
        """Assumption literals (internal form) responsible for ``p`` being false."""
        out = [p ^ 1]
        if not self.trail_lim:
            return out
        seen = {p >> 1}
        for i in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            if v in seen:
                r = self.reason[v]
                if r is None:
                    out.append(lit)
                else:
                    for q in r[1:]:
                        if self.level[q >> 1] > 0:
                            seen.add(q >> 1)
                seen.discard(v)
        return out

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        for i in range(len(self.trail) - 1, lim - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            self.val[lit] = 0
            self.val[lit ^ 1] = 0
            self.reason[v] = None
            self.phase[v] = not (lit & 1)
            if self.decidable[v]:
                heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        if len(self.heap) > 4 * self.nvars + 64:
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1)
                         if self.decidable[u] and self.val[2 * u] == 0]
            heapq.heapify(self.heap)

    def _pick(self) -> int:
        heap = self.heap
        while heap:
            act, v = heapq.heappop(heap)
            if self.val[2 * v] == 0 and -act == self.activity[v]:
                return v
        return 0

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Search for a model extending ``assumptions``.

        On success ``self.model[v]`` holds v's value; on failure ``self.core``
        lists the assumptions (as given) that cannot hold together.
        """
        self.core = []
        if not self.ok:
            return False
        for x in assumptions:
            self.ensure_vars(abs(x))
        self._assume_ext = list(assumptions)
        assume = [self._lit(x) for x in assumptions]
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart = 0
        while True:
            budget = 100 * _luby(restart)
            restart += 1
            status = self._search(budget, assume)
            if status is not None:
                break
        self._cancel_until(0)
        return status

    def _search(self, budget: int, assume: list[int]) -> Optional[bool]:
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= 1.05
                continue
            if conflicts >= budget:
                self._cancel_until(0)
                return None
            lvl = len(self.trail_lim)
            nxt = -1
            while lvl < len(assume):
                a = assume[lvl]
                if self.val[a] == 1:
                    self.trail_lim.append(len(self.trail))
                    lvl += 1
                    continue
                if self.val[a] == -1:
                    lits = self._analyze_final(a ^ 1)
                    back = {l: x for l, x in zip(assume, self._assume_ext)}
                    self.core = sorted({back[l] for l in lits if l in back})
                    return False
                nxt = a
                break
            if nxt < 0:
                v = self._pick()
                if v == 0:
                    self.model = [False] + [self.val[2 * u] == 1 for u in range(1, self.nvars + 1)]
                    return True
                self.decisions += 1
                nxt = 2 * v if self.phase[v] else 2 * v + 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)

    def value(self, x: int) -> bool:
        return self.model[x] if x > 0 else not self.model[-x]
