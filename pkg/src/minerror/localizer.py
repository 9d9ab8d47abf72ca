"""Minimum error sources: iterative expansion, full expansion, and mask enumeration."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import constraints as C
from . import inference as I
from . import syntax as S
from .solver.maxsat import MaxResSolver, SolveResult
from .syntax import Location

BRUTE_FORCE_MAX_NODES = 30


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ErrorSource:
    locations: frozenset[Location]
    cost: int
    iterations: int
    expansions: int

    @property
    def sorted_locations(self) -> list[Location]:
        return sorted(self.locations)


@dataclass(frozen=True)
class IterationRecord:
    expanded: int
    assertions: int
    penalty: int
    false_pvars: tuple[Location, ...]
    sources: tuple[Location, ...]
    new_usages: tuple[Location, ...]
    generate_seconds: float = field(default=0.0, compare=False)
    solve_seconds: float = field(default=0.0, compare=False)
    solver_stats: dict = field(default_factory=dict, compare=False)


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    index_seconds: float = 0.0

    @property
    def solve_calls(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class StepResult:
    result: SolveResult
    assertions: int
    sources: frozenset[Location]
    false_pvars: frozenset[Location]
    generate_seconds: float
    solve_seconds: float


def _preferences(idx: C.LocationIndex, cost: S.CostFunction, expanded: frozenset[Location]) -> list[int]:
    """Tie-break among optimal models.

    Keep principal types correct where that avoids new expansions, then pick
    the lexicographically smallest set of masked locations.
    """
    prefs = [idx.pvar(d) for d in sorted(idx.uloc) if not idx.uloc[d] <= expanded]
    prefs += [-idx.prop(l) for l in idx.locs if l in cost.weights]
    return prefs


def solve_step(p: S.Expr, cost: S.CostFunction, expanded: Iterable[Location], *,
               index: Optional[C.LocationIndex] = None, dup_opt: bool = True) -> StepResult:
    """Optimal model of the constraints of ``p`` under the expansion set ``expanded``."""
    idx = index or C.build_index(p)
    expanded = frozenset(expanded)
    t0 = time.perf_counter()
    inst = C.build_instance(p, cost, expanded, index=idx, dup_opt=dup_opt)
    t1 = time.perf_counter()
    hard: list[list[int]] = [[v] for v in inst.hard_units]
    for d in inst.pdefs:
        conj = d.props + d.deps
        hard += [[-d.var, x] for x in conj]
        hard.append([d.var] + [-x for x in conj])
    solver = MaxResSolver(hard, inst.soft, nvars=2 * len(idx.locs))
    for a in inst.assertions:
        solver.assert_guarded(a.guards, a.lhs, a.rhs)
    solver.optimize()
    solver.prefer(_preferences(idx, cost, expanded))
    res = solver.result()
    t2 = time.perf_counter()
    model = res.model
    sources = frozenset(l for l in idx.locs if l in cost.weights and not model[idx.prop(l)])
    false_p = frozenset(d for d in idx.uloc if not model[idx.pvar(d)])
    return StepResult(res, len(inst.assertions), sources, false_p, t1 - t0, t2 - t1)


def scope(idx: C.LocationIndex, expanded: Iterable[Location]) -> frozenset[Location]:
    """Usage locations not hidden inside an unexpanded, used definition.

    Removal does not depend on the current result, so one pass reaches the fixpoint.
    """
    expanded = frozenset(expanded)
    out = set(idx.dloc)
    for d, users in idx.uloc.items():
        if users and not (users & expanded):
            out.difference_update(idx.vloc[d])
    return frozenset(out)


def usages(idx: C.LocationIndex, expanded: Iterable[Location], step: StepResult) -> frozenset[Location]:
    """In-scope usages whose definition's principal type was relaxed by the model."""
    return frozenset(u for u in scope(idx, expanded) if idx.dloc[u] in step.false_pvars)


def _source(locs: Iterable[Location], cost: S.CostFunction, iterations: int, expansions: int) -> ErrorSource:
    locs = frozenset(locs)
    return ErrorSource(locs, cost(locs), iterations, expansions)


def iter_min_error(p: S.Expr, cost: Optional[S.CostFunction] = None, *,
                   dup_opt: bool = True) -> tuple[ErrorSource, IterationTrace]:
    """Expand principal types lazily until the optimum no longer needs more usages."""
    cost = cost or S.ast_size_cost(p)
    trace = IterationTrace()
    t0 = time.perf_counter()
    idx = C.build_index(p)
    trace.index_seconds = time.perf_counter() - t0
    expanded = idx.frontier0
    while True:
        step = solve_step(p, cost, expanded, index=idx, dup_opt=dup_opt)
        new = usages(idx, expanded, step)
        trace.records.append(IterationRecord(
            expanded=len(expanded),
            assertions=step.assertions,
            penalty=step.result.penalty,
            false_pvars=tuple(sorted(step.false_pvars)),
            sources=tuple(sorted(step.sources)),
            new_usages=tuple(sorted(new - expanded)),
            generate_seconds=step.generate_seconds,
            solve_seconds=step.solve_seconds,
            solver_stats=step.result.stats,
        ))
        if new <= expanded:
            src = _source(step.sources, cost, len(trace.records) - 1, len(expanded - idx.frontier0))
            return src, trace
        expanded = expanded | new


def naive_min_error(p: S.Expr, cost: Optional[S.CostFunction] = None, *,
                    dup_opt: bool = True) -> tuple[ErrorSource, IterationTrace]:
    """One solve with every let usage expanded."""
    cost = cost or S.ast_size_cost(p)
    trace = IterationTrace()
    t0 = time.perf_counter()
    idx = C.build_index(p)
    trace.index_seconds = time.perf_counter() - t0
    everything = frozenset(idx.locs)
    step = solve_step(p, cost, everything, index=idx, dup_opt=dup_opt)
    trace.records.append(IterationRecord(
        expanded=len(everything),
        assertions=step.assertions,
        penalty=step.result.penalty,
        false_pvars=tuple(sorted(step.false_pvars)),
        sources=tuple(sorted(step.sources)),
        new_usages=(),
        generate_seconds=step.generate_seconds,
        solve_seconds=step.solve_seconds,
        solver_stats=step.result.stats,
    ))
    return _source(step.sources, cost, 0, len(everything - idx.frontier0)), trace


def brute_force_min_error(p: S.Expr, cost: Optional[S.CostFunction] = None, *,
                          max_nodes: int = BRUTE_FORCE_MAX_NODES) -> ErrorSource:
    """Enumerate prefix-free location sets by increasing cost; return the first that types."""
    locs = S.locations(p)
    if len(locs) > max_nodes:
        raise InstanceTooLarge(f"{len(locs)} nodes (limit {max_nodes})")
    cost = cost or S.ast_size_cost(p)
    cands = [l for l in locs if l in cost.weights]
    w = [cost.weights[l] for l in cands]
    heap: list[tuple[int, tuple[int, ...]]] = [(0, ())]
    while heap:
        c, chosen = heapq.heappop(heap)
        picked = [cands[i] for i in chosen]
        if I.well_typed(S.mask(p, picked)):
            return ErrorSource(frozenset(picked), c, 0, 0)
        start = chosen[-1] + 1 if chosen else 0
        for j in range(start, len(cands)):
            l = cands[j]
            if any(S.is_prefix(q, l) or S.is_prefix(l, q) for q in picked):
                continue
            heapq.heappush(heap, (c + w[j], chosen + (j,)))
    raise AssertionError("masking the root always types")
