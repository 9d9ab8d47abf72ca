"""Command-line interface.

Exit codes: 0 well typed (or nothing to report), 1 an error source was found,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import constraints as C
from . import gen as G
from . import inference as I
from . import localizer as L
from . import syntax as S
from .solver import kernel

REPORT_VERSION = 1
ALGORITHMS = ("iterative", "naive", "brute")


@dataclass(frozen=True)
class RunConfig:
    algorithm: str = "iterative"
    dup_opt: bool = True
    json: bool = False
    hard_builtins: bool = False
    solver_stats: bool = False


class UsageError(Exception):
    pass


def loc_str(loc: S.Location) -> str:
    return ".".join(map(str, loc)) or "root"


def snippet(text: str, span: S.Span) -> str:
    lines = text.splitlines()
    if span.line == 0 or span.line > len(lines):
        return ""
    if span.line == span.end_line:
        return lines[span.line - 1][span.col - 1:span.end_col - 1]
    parts = [lines[span.line - 1][span.col - 1:]]
    parts += lines[span.line:span.end_line - 1]
    parts.append(lines[span.end_line - 1][:span.end_col - 1])
    return "\n".join(parts)


def localize(text: str, path: str, cfg: RunConfig) -> dict:
    """Parse, localize, and build a JSON-ready report.  Timing lives under ``timing``."""
    t0 = time.perf_counter()
    p = S.parse(text)
    t_parse = time.perf_counter() - t0
    cost = S.ast_size_cost(p, hard_builtins=cfg.hard_builtins)
    trace: Optional[L.IterationTrace] = None
    t1 = time.perf_counter()
    if cfg.algorithm == "iterative":
        src, trace = L.iter_min_error(p, cost, dup_opt=cfg.dup_opt)
    elif cfg.algorithm == "naive":
        src, trace = L.naive_min_error(p, cost, dup_opt=cfg.dup_opt)
    elif cfg.algorithm == "brute":
        src = L.brute_force_min_error(p, cost)
    else:
        raise UsageError(f"unknown algorithm {cfg.algorithm!r}")
    t_total = time.perf_counter() - t1
    report = {
        "version": REPORT_VERSION,
        "program": path,
        "algorithm": cfg.algorithm,
        "dup_opt": cfg.dup_opt,
        "nodes": S.size(p),
        "well_typed": not src.locations,
        "cost": src.cost,
        "iterations": src.iterations,
        "expansions": src.expansions,
        "sources": [],
    }
    for loc in src.sorted_locations:
        sp = S.subexpr(p, loc).span
        report["sources"].append({
            "location": loc_str(loc),
            "line": sp.line,
            "col": sp.col,
            "end_line": sp.end_line,
            "end_col": sp.end_col,
            "weight": cost.weights[loc],
            "snippet": snippet(text, sp),
        })
    timing = {"parse": t_parse, "total": t_total}
    if trace is not None:
        report["assertions"] = [r.assertions for r in trace.records]
        report["penalties"] = [r.penalty for r in trace.records]
        report["expanded_sizes"] = [r.expanded for r in trace.records]
        report["expanded_usages"] = [[loc_str(u) for u in r.new_usages] for r in trace.records]
        timing["index"] = trace.index_seconds
        timing["generate"] = sum(r.generate_seconds for r in trace.records)
        timing["solve"] = sum(r.solve_seconds for r in trace.records)
        if cfg.solver_stats:
            report["solver_stats"] = [r.solver_stats for r in trace.records]
    report["timing"] = timing
    return report


def render_human(report: dict) -> str:
    if report["well_typed"]:
        return f"{report['program']}: well typed"
    out = [f"{report['program']}: minimum error source of cost {report['cost']}"
           f" ({report['algorithm']}, {report['iterations']} expansion round(s),"
           f" {report['expansions']} expanded usage(s))"]
    for s in report["sources"]:
        snip = s["snippet"].replace("\n", " ")
        out.append(f"  line {s['line']}, col {s['col']}-{s['end_col']}: {snip}  [weight {s['weight']}]")
    if "assertions" in report:
        out.append("  assertions per iteration: " + ", ".join(map(str, report["assertions"])))
    if "solver_stats" in report:
        for i, st in enumerate(report["solver_stats"]):
            out.append(f"  solve {i}: " + ", ".join(f"{k}={v}" for k, v in st.items()))
    t = report["timing"]
    out.append("  time: " + ", ".join(f"{k} {v * 1000:.1f} ms" for k, v in t.items()))
    return "\n".join(out)


def cmd_localize(path: str, cfg: RunConfig) -> tuple[int, str]:
    text = Path(path).read_text() if path != "-" else sys.stdin.read()
    report = localize(text, path, cfg)
    body = json.dumps(report, indent=2, sort_keys=True) if cfg.json else render_human(report)
    return (0 if report["well_typed"] else 1), body


def cmd_check(path: str) -> tuple[int, str]:
    text = Path(path).read_text() if path != "-" else sys.stdin.read()
    p = S.parse(text)
    sigma = I.type_of(p)
    if sigma is None:
        return 1, f"{path}: ill typed"
    return 0, f"{path}: {I.show_schema(sigma)}"


def cmd_emit(path: str, out: str, cfg: RunConfig) -> tuple[int, str]:
    """Write the instance solved first by the chosen algorithm."""
    text = Path(path).read_text() if path != "-" else sys.stdin.read()
    p = S.parse(text)
    idx = C.build_index(p)
    expanded = idx.frontier0 if cfg.algorithm == "iterative" else frozenset(idx.locs)
    cost = S.ast_size_cost(p, hard_builtins=cfg.hard_builtins)
    inst = C.build_instance(p, cost, expanded, index=idx, dup_opt=cfg.dup_opt)
    dump = C.emit_instance(inst)
    if out == "-":
        return 0, dump.rstrip("\n")
    Path(out).write_text(dump)
    return 0, f"wrote {len(inst.assertions)} assertions to {out}"


# ---------------------------------------------------------------------------
# bench


def _bench_one(args: tuple[str, str, bool, bool]) -> dict:
    path, group, dup_opt, hard_builtins = args
    row = {"program": path, "group": group}
    try:
        text = Path(path).read_text()
        S.parse(text)
    except (S.SyntaxError_, S.UnboundVariable) as exc:
        row["error"] = str(exc)
        return row
    for algo in ("iterative", "naive"):
        cfg = RunConfig(algorithm=algo, dup_opt=dup_opt, hard_builtins=hard_builtins)
        rep = localize(text, path, cfg)
        row["nodes"] = rep["nodes"]
        row[f"{algo}_cost"] = rep["cost"]
        row[f"{algo}_assertions"] = rep["assertions"][-1]
        row[f"{algo}_seconds"] = rep["timing"]["total"]
        row[f"{algo}_generate_seconds"] = rep["timing"]["generate"]
        if algo == "iterative":
            row["iterations"] = rep["iterations"]
            row["expansions"] = rep["expansions"]
    return row


BENCH_FIELDS = ("iterative_assertions", "naive_assertions", "iterative_seconds", "naive_seconds",
                "iterations", "expansions")


def summarize(rows: Sequence[dict]) -> dict[str, dict[str, tuple[float, float, float]]]:
    groups: dict[str, list[dict]] = {}
    for r in rows:
        if "error" not in r:
            groups.setdefault(r["group"], []).append(r)
    out = {}
    for g, rs in sorted(groups.items()):
        out[g] = {f: (min(r[f] for r in rs), statistics.fmean(r[f] for r in rs), max(r[f] for r in rs))
                  for f in BENCH_FIELDS}
    return out


def cmd_bench(directory: str, cfg: RunConfig, jobs: int = 1) -> tuple[list[dict], dict]:
    root = Path(directory)
    if not root.is_dir():
        raise UsageError(f"{directory} is not a directory")
    files = sorted(root.rglob("*.ml"))
    tasks = []
    for f in files:
        rel = f.parent.relative_to(root)
        tasks.append((str(f), str(rel) if str(rel) != "." else root.name, cfg.dup_opt, cfg.hard_builtins))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    return rows, summarize(rows)


def render_bench(rows: Sequence[dict], summary: dict) -> str:
    head = f"{'program':<36} {'nodes':>5} {'cost':>4} {'iter':>4} {'exp':>4} {'A(iter)':>8} {'A(naive)':>8} {'t(iter)':>8} {'t(naive)':>8}"
    out = [head, "-" * len(head)]
    for r in rows:
        name = os.path.relpath(r["program"])[-36:]
        if "error" in r:
            out.append(f"{name:<36} skipped: {r['error']}")
            continue
        out.append(f"{name:<36} {r['nodes']:>5} {r['iterative_cost']:>4} {r['iterations']:>4} {r['expansions']:>4}"
                   f" {r['iterative_assertions']:>8} {r['naive_assertions']:>8}"
                   f" {r['iterative_seconds']:>8.3f} {r['naive_seconds']:>8.3f}")
    if summary:
        out.append("")
        out.append(f"{'group':<20} {'field':<22} {'min':>10} {'avg':>10} {'max':>10}")
        for g, fields in summary.items():
            for f, (lo, avg, hi) in fields.items():
                out.append(f"{g:<20} {f:<22} {lo:>10.3f} {avg:>10.3f} {hi:>10.3f}")
    return "\n".join(out)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minerror", description="Locate minimum type error sources.")
    ap.add_argument("file", nargs="?", help="program to analyse ('-' for stdin)")
    ap.add_argument("--algo", choices=ALGORITHMS, default="iterative")
    ap.add_argument("--json", action="store_true", help="machine-readable report")
    ap.add_argument("--check", action="store_true", help="only type-check and print the principal type")
    ap.add_argument("--emit-constraints", metavar="FILE", help="write the first solver instance ('-' for stdout)")
    ap.add_argument("--no-dup-opt", action="store_true", help="keep duplicate definition constraints")
    ap.add_argument("--hard-builtins", action="store_true", help="never blame uses of builtins")
    ap.add_argument("--solver-stats", action="store_true", help="report SAT/theory/MaxRes counters")
    ap.add_argument("--bench", metavar="DIR", help="run iterative and naive over every .ml file in DIR")
    ap.add_argument("--gen-depth", type=int, metavar="N", help="print a nested polymorphism program")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-error", action="store_true", help="generated program is well typed")
    ap.add_argument("--jobs", type=int, default=1, metavar="N")
    ap.add_argument("--version", action="store_true", help="print version and kernel in use")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    cfg = RunConfig(algorithm=args.algo, dup_opt=not args.no_dup_opt, json=args.json,
                    hard_builtins=args.hard_builtins, solver_stats=args.solver_stats)
    try:
        if args.version:
            print(f"minerror report v{REPORT_VERSION}, {kernel.IMPLEMENTATION} kernel")
            return 0
        if args.gen_depth is not None:
            if args.bench:
                return _gen_family(args, cfg)
            print(G.gen_nested_poly(args.gen_depth, args.seed, inject=not args.no_error), end="")
            return 0
        if args.bench:
            rows, summary = cmd_bench(args.bench, cfg, args.jobs)
            _warn_skipped(rows)
            print(json.dumps({"version": REPORT_VERSION, "rows": rows, "summary": summary}, indent=2)
                  if cfg.json else render_bench(rows, summary))
            return 0
        if not args.file:
            raise UsageError("no input file")
        if args.check:
            code, body = cmd_check(args.file)
        elif args.emit_constraints:
            code, body = cmd_emit(args.file, args.emit_constraints, cfg)
        else:
            code, body = cmd_localize(args.file, cfg)
        print(body)
        return code
    except (UsageError, ValueError, OSError) as exc:
        print(f"minerror: {exc}", file=sys.stderr)
        return 2
    except (S.SyntaxError_, S.UnboundVariable) as exc:
        print(f"minerror: {exc}", file=sys.stderr)
        return 2


def _warn_skipped(rows: Sequence[dict]) -> None:
    for r in rows:
        if "error" in r:
            print(f"minerror: skipping {r['program']}: {r['error']}", file=sys.stderr)


def _gen_family(args, cfg: RunConfig) -> int:
    """Write depths 1..N into the bench directory, then bench it."""
    out = Path(args.bench)
    out.mkdir(parents=True, exist_ok=True)
    for d in range(1, args.gen_depth + 1):
        (out / f"nested_d{d:02d}_s{args.seed}.ml").write_text(
            G.gen_nested_poly(d, args.seed, inject=not args.no_error))
    rows, summary = cmd_bench(str(out), cfg, args.jobs)
    print(json.dumps({"version": REPORT_VERSION, "rows": rows, "summary": summary}, indent=2)
          if cfg.json else render_bench(rows, summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
