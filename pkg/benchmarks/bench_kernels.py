"""Compare the compiled and pure-Python unification kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Workloads: random equation systems pushed through ``first_failure`` and
irreducible-core extraction, and end-to-end localization of the nested
polymorphism family.  Each workload runs in a fresh interpreter per kernel
so the import-time selection is honoured.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, random, sys, time
from minerror.solver import kernel, theory as T
from minerror import inference as I, syntax as S, localizer as L, gen as G

def rterm(rng, d):
    if d == 0 or rng.random() < 0.3:
        return I.TVar(rng.randint(1, 40)) if rng.random() < 0.7 else rng.choice([I.INT, I.BOOL])
    return I.fun(rterm(rng, d - 1), rterm(rng, d - 1))

def unify_workload(repeat):
    rng = random.Random(0)
    systems = [[(rterm(rng, 3), rterm(rng, 3)) for _ in range(60)] for _ in range(200)]
    t = time.perf_counter()
    for _ in range(repeat):
        for eqs in systems:
            T.theory_check(eqs)
    return time.perf_counter() - t

def localize_workload(repeat):
    progs = [S.parse(G.gen_nested_poly(d, d)) for d in range(3, 7)]
    t = time.perf_counter()
    for _ in range(repeat):
        for p in progs:
            L.naive_min_error(p)
    return time.perf_counter() - t

repeat = int(sys.argv[1])
print(json.dumps({"kernel": kernel.IMPLEMENTATION,
                  "unify": unify_workload(repeat),
                  "localize": localize_workload(repeat)}))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if pure:
        env["MINERROR_PURE_PYTHON"] = "1"
    else:
        env.pop("MINERROR_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    compiled = run(False, args.repeat)
    python = run(True, args.repeat)
    if compiled["kernel"] != "cython":
        print("compiled kernel not built; only the Python fallback is available")
    print(f"{'workload':<10} {'python (s)':>11} {compiled['kernel'] + ' (s)':>11} {'speedup':>8}")
    for w in ("unify", "localize"):
        print(f"{w:<10} {python[w]:>11.3f} {compiled[w]:>11.3f} {python[w] / compiled[w]:>7.2f}x")


if __name__ == "__main__":
    main()
