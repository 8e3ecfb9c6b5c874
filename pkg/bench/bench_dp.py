#!/usr/bin/env python3
"""Benchmark the float walk-counting kernel: numba @njit loops vs the
pure-numpy shifted-slice fallback.

The same comparison can be forced at import time by setting
ORTHANTWALKS_NO_NUMBA=1, which makes the package use the numpy path
everywhere.  Run:

    python3 bench/bench_dp.py [--n 512] [--n3 96] [--repeats 3]
"""

import argparse
import time

import numpy as np

from orthantwalks import _dp
from orthantwalks.enumeration import count_profile
from orthantwalks.stepset import build_stepset


def best_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def compare(model, name, n_max, repeats):
    if _dp.NUMBA_AVAILABLE:
        count_profile(model, min(n_max, 32))  # trigger JIT compilation
    t_numba = best_time(lambda: count_profile(model, n_max), repeats) \
        if _dp.NUMBA_AVAILABLE else float("nan")
    t_numpy = best_time(lambda: count_profile(model, n_max, force_numpy=True),
                        repeats)
    a = count_profile(model, n_max)
    b = count_profile(model, n_max, force_numpy=True)
    worst = 0.0
    for key, series in a.items():
        mask = series.values > 0
        other = b[key].values[mask]
        worst = max(worst, float(np.max(np.abs(series.values[mask] / other - 1)))
                    if other.size else 0.0)
    speedup = t_numpy / t_numba if t_numba == t_numba else float("nan")
    print(f"{name:22s} n={n_max:4d}  numba {t_numba:7.3f}s  numpy {t_numpy:7.3f}s  "
          f"speedup {speedup:5.2f}x  max rel diff {worst:.2e}")
    if worst > 1e-9:
        raise SystemExit("kernel paths disagree beyond rounding")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--n3", type=int, default=96)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {_dp.kernel_backend()}")
    compare(build_stepset(2, ["N", "S", "E", "W"]), "quadrant 4-step", args.n,
            args.repeats)
    compare(build_stepset(2, ["NE", "NW", "E", "W", "SE", "SW", "S"]),
            "quadrant 7-step", args.n, args.repeats)
    d3 = build_stepset(3, [((0, 0, 1), 1)] + [((sx, sy, -1), 1)
                                              for sx in (-1, 1) for sy in (-1, 1)])
    compare(d3, "octant 5-step", args.n3, args.repeats)


if __name__ == "__main__":
    main()
