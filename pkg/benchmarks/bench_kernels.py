"""Compare the numba and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--instances N]

Kernel timings call both backends directly from ``kernels.BACKENDS``.
The end-to-end suite runs in a subprocess per backend, since the backend
is fixed when ``arglts.kernels`` is imported.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from arglts import kernels
from arglts.checks import random_aaf
from arglts.transform import build_lelu_context

SUITE = """
import time
from arglts import kernels
from arglts.checks import random_instances, run_suite
run_suite(random_instances(5, seed=1), ("base", "lelu"))  # warm up caches
t0 = time.perf_counter()
r = run_suite(random_instances({n}, seed=2024), ("base", "lelu"))
print(kernels.BACKEND, r.runs, r.ok, time.perf_counter() - t0)
"""


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_complete(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in (6, 8, 10):
        adj = rng.random((n, n)) < 0.3
        row = [f"complete_codes n={n}"]
        for name, impl in kernels.BACKENDS.items():
            row.append((name, best_of(lambda: impl["complete_codes"](adj), repeat)))
        rows.append(row)
    return rows


def bench_triggered(repeat):
    rng = np.random.default_rng(1)
    af = random_aaf(rng, max_args=7)
    while len(af.arguments) < 7:
        af = random_aaf(rng, max_args=7)
    ctx = build_lelu_context(af)
    space = len(ctx.fluents)
    states = rng.integers(0, 2, size=(2000, space)).astype(np.uint8)
    row = [f"triggered x2000 ({len(ctx.exogenous)} events)"]
    for name, impl in kernels.BACKENDS.items():
        fn = impl["triggered"]

        def go():
            for s in states:
                fn(s, ctx._clauses, ctx._owners, len(ctx.exogenous))

        row.append((name, best_of(go, repeat)))
    return [row]


def bench_suite(instances):
    out = []
    for flag in ("0", "1"):
        env = dict(os.environ, ARGLTS_PURE_NUMPY=flag)
        res = subprocess.run([sys.executable, "-c", SUITE.format(n=instances)],
                             env=env, capture_output=True, text=True, check=True)
        backend, runs, ok, secs = res.stdout.split()
        out.append((backend, float(secs), runs, ok))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--instances", type=int, default=200)
    args = ap.parse_args()

    print(f"backends available: {', '.join(kernels.BACKENDS)}")
    for row in bench_complete(args.repeat) + bench_triggered(args.repeat):
        label, *timings = row
        cells = "  ".join(f"{name:>5s} {secs * 1e3:9.3f} ms" for name, secs in timings)
        print(f"{label:40s} {cells}")
    for backend, secs, runs, ok in bench_suite(args.instances):
        print(f"suite {args.instances} instances ({runs} runs, ok={ok}) {backend:>5s} {secs:7.2f} s")


if __name__ == "__main__":
    main()
