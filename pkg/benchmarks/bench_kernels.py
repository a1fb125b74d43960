#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot paths (pairwise smoothness sums, potential sums, and the
max-plus knapsack merge cascade) on desk-scale grids and prints a table.

Run:  python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from oscnorm import _kernels_py

try:
    from oscnorm import _kernels as compiled
except ImportError:
    compiled = None


def _offset_table(side, dim, exponent, mu):
    offs = np.arange(-(side - 1), side, dtype=np.float64)
    r2 = np.zeros((offs.size,) * dim)
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = offs.size
        r2 = r2 + (offs**2).reshape(shape)
    center = (side - 1,) * dim
    r2[center] = 1.0
    table = r2 ** (exponent / 2.0) * mu
    table[center] = 0.0
    return table


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_field(repeat):
    cases = []
    for dim, level in [(1, 12), (2, 6)]:
        side = 1 << level
        n = side**dim
        rng = np.random.default_rng(level)
        vals = rng.standard_normal(n)
        table = _offset_table(side, dim, -1.5, 2.0 ** (-dim * level))

        def py():
            _kernels_py.diffpow_weighted_sums(vals, 2.0, side, dim, table)

        row = {"kernel": f"smoothness field n={dim} N={n}", "python": timeit(py, repeat)}
        if compiled is not None:
            if dim == 1:
                comp = lambda: compiled.diffpow_weighted_sums_1d(vals, 2.0, table)
            else:
                comp = lambda: compiled.diffpow_weighted_sums_2d(
                    vals.reshape(side, side), 2.0, table
                )
            row["compiled"] = timeit(comp, repeat)
        cases.append(row)
    return cases


def bench_potential(repeat):
    cases = []
    for dim, level in [(1, 12), (2, 6)]:
        side = 1 << level
        n = side**dim
        rng = np.random.default_rng(level + 100)
        vals = rng.standard_normal(n)
        table = _offset_table(side, dim, -0.5, 2.0 ** (-dim * level))
        table[(side - 1,) * dim] = 1.0

        def py():
            _kernels_py.weighted_sums(vals, side, dim, table)

        row = {"kernel": f"potential sums n={dim} N={n}", "python": timeit(py, repeat)}
        if compiled is not None:
            if dim == 1:
                comp = lambda: compiled.weighted_sums_1d(vals, table)
            else:
                comp = lambda: compiled.weighted_sums_2d(
                    vals.reshape(side, side), table
                )
            row["compiled"] = timeit(comp, repeat)
        cases.append(row)
    return cases


def bench_knapsack(repeat):
    # the cascade of merges a knapsack over 4096 cells performs
    rng = np.random.default_rng(7)
    n = 4096

    def run(merge):
        tables = [np.zeros(2) for _ in range(n)]
        rows = tables
        while len(rows) > 1:
            nxt = []
            for i in range(0, len(rows), 2):
                merged = merge(rows[i], rows[i + 1])
                np.maximum(merged[-1], rng.random(), out=merged[-1:])
                nxt.append(merged)
            rows = nxt

    row = {
        "kernel": f"knapsack merges N={n}",
        "python": timeit(lambda: run(_kernels_py.maxplus_merge), repeat),
    }
    if compiled is not None:
        row["compiled"] = timeit(lambda: run(compiled.maxplus_merge), repeat)
    return [row]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; timing the numpy fallback only\n")
    rows = bench_field(args.repeat) + bench_potential(args.repeat) + bench_knapsack(
        args.repeat
    )
    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for r in rows:
        py = r["python"]
        if "compiled" in r:
            comp = r["compiled"]
            print(
                f"{r['kernel']:<{width}}  {py * 1e3:>8.1f}ms  "
                f"{comp * 1e3:>8.1f}ms  {py / comp:>7.1f}x"
            )
        else:
            print(f"{r['kernel']:<{width}}  {py * 1e3:>8.1f}ms  {'-':>10}  {'-':>8}")


if __name__ == "__main__":
    main()
