#!/usr/bin/env python3
"""Time the harness kernels under numba and numpy on the same inputs.

    python3 benchmarks/bench_kernels.py [--rounds N] [--repeat R]

Each kernel is checked for identical output across backends before timing.
"""

import argparse
import time

import numpy as np

from nlbox.boxcore import make_ks_box
from nlbox.charts import CHARTS, m1_mixture
from nlbox.harness import RunConfig, cumulative_table, run_strategy
from nlbox.harness.kernels import get_impl, numba_impl


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    rng = np.random.default_rng(0)
    xs = rng.integers(0, 5, n)
    ys = rng.integers(0, 5, n)
    u = rng.random(n)
    cum = cumulative_table(make_ks_box(5, 1 / 3))
    bits = np.array([c.bits for c in CHARTS], dtype=np.int8)
    lam = rng.integers(0, 32, n)
    ccum = np.cumsum(np.full(32, 1 / 32))
    ccum[-1] = 1.0
    a = rng.integers(0, 2, n).astype(np.int8)
    b = rng.integers(0, 2, n).astype(np.int8)
    t1 = rng.random(5)
    t3 = rng.random((5, 2, 5))
    return {
        "sample_cells": lambda k: k.sample_cells(cum, xs, ys, u),
        "tally": lambda k: k.tally(xs, ys, a, b, 5, 5),
        "chart_lookup": lambda k: k.chart_lookup(bits, lam, xs),
        "categorical": lambda k: k.categorical(ccum, u),
        "threshold1": lambda k: k.threshold1(t1, xs, u),
        "threshold3": lambda k: k.threshold3(t3, xs, a.astype(np.int64), ys, u),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=1 << 20)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if numba_impl is None:
        print("numba unavailable; nothing to compare")
        return
    nb, npy = get_impl("numba"), get_impl("numpy")
    print(f"{'kernel':<14}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, fn in cases(args.rounds).items():
        assert np.array_equal(fn(nb), fn(npy)), name  # also warms the jit
        t_np = best_of(lambda: fn(npy), args.repeat)
        t_nb = best_of(lambda: fn(nb), args.repeat)
        print(f"{name:<14}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>10.2f}")

    t0 = time.perf_counter()
    rep = run_strategy(m1_mixture(), RunConfig(0, args.rounds))
    print(f"\nend-to-end M1 run, {args.rounds} rounds: {time.perf_counter() - t0:.2f} s (score {rep.score:.6f})")


if __name__ == "__main__":
    main()
