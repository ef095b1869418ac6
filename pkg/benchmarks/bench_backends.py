#!/usr/bin/env python3
"""Benchmark the compiled integer kernels against the pure-Python fallback.

Two views: direct kernel timings on identical packed inputs, and end-to-end
Magnus-term pipelines run in subprocesses with MAGNUS_LAB_PURE toggled.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import os
import random
import subprocess
import sys
import time

from magnuslab import _kernels_py

try:
    from magnuslab import _speedups
except ImportError:
    _speedups = None


def random_packed(rng, n, order, scale=10**6):
    out = []
    for _ in range(order + 1):
        nums = [rng.randint(-scale, scale) for _ in range(n * n)]
        out.append((nums, rng.randint(1, scale)))
    return out


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_bench(repeat):
    rng = random.Random(0)
    cases = [
        ("series_mul 2x2 K=40", random_packed(rng, 2, 40), 2, 40),
        ("series_mul 5x5 K=24", random_packed(rng, 5, 24), 5, 24),
        ("series_mul 2x2 K=40 bigint", random_packed(rng, 2, 40, scale=10**40), 2, 40),
    ]
    print(f"{'kernel case':34} {'python':>10} {'cython':>10} {'speedup':>9}")
    for label, packed, n, order in cases:
        other = random_packed(rng, n, order)
        t_py = time_call(_kernels_py.series_mul_packed, packed, other, n, order, repeat=repeat)
        if _speedups is None:
            print(f"{label:34} {t_py*1e3:9.2f}ms {'n/a':>10} {'':>9}")
            continue
        t_cy = time_call(_speedups.series_mul_packed, packed, other, n, order, repeat=repeat)
        print(f"{label:34} {t_py*1e3:9.2f}ms {t_cy*1e3:9.2f}ms {t_py/t_cy:8.2f}x")


PIPELINE = r"""
import time
from fractions import Fraction
import magnuslab
from magnuslab.counterexamples import MinimalPair, minimal_magnus_terms, psi_measure
from magnuslab.measures import magnus_terms

t0 = time.perf_counter()
minimal_magnus_terms(MinimalPair.of_pi(Fraction(1, 3), 1), 40)
t1 = time.perf_counter()
magnus_terms(psi_measure(8), 16)
t2 = time.perf_counter()
print(f"{magnuslab.backend_name()},{t1 - t0:.4f},{t2 - t1:.4f}")
"""


def pipeline_bench():
    print(f"\n{'pipeline (subprocess)':34} {'minimal K=40':>13} {'psi_8 K=16':>11}")
    for pure in ("0", "1"):
        env = dict(os.environ, MAGNUS_LAB_PURE=pure)
        out = subprocess.run(
            [sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True
        )
        backend, t_min, t_psi = out.stdout.strip().split(",")
        print(f"{'backend=' + backend:34} {float(t_min)*1e3:11.1f}ms {float(t_psi)*1e3:9.1f}ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _speedups is None:
        print("note: compiled extension not available; timing the fallback only")
    kernel_bench(args.repeat)
    pipeline_bench()


if __name__ == "__main__":
    main()
