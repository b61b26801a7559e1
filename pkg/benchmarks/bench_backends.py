#!/usr/bin/env python3
"""Time the numba kernels against their numpy/Python fallbacks.

Run from the repository root:

    python benchmarks/bench_backends.py [--repeats 5]

Numba must be importable for the comparison; compilation happens during the
warm-up call and is excluded from the timings.
"""

import argparse
import time

import numpy as np

from fraczero import kernels
from fraczero._backend import HAS_NUMBA


def timeit(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases():
    rng = np.random.default_rng(42)

    num = rng.standard_normal(6)
    den = rng.standard_normal(5)
    x = rng.standard_normal(2_000_000) + 1j * rng.standard_normal(2_000_000)

    taps = rng.standard_normal(200)
    u = rng.standard_normal(200_000)

    b = np.array([0.0, -0.2358341884794497, 0.26108171174132])
    a = np.array([1.0, -1.6411371752628572, 0.6663846985247274])
    # stable unit-DC canceller-like taps so the loop runs the full horizon
    loop_taps = np.exp(-0.05 * np.arange(200))
    loop_taps /= loop_taps.sum()
    r = np.ones(36_000)  # 30 minutes of loop time at T = 50 ms

    d = rng.standard_normal(81) + 1j * rng.standard_normal(81)
    z = np.exp(1j * np.linspace(0.01, 3.1, 20_000))

    return [
        ("rational_eval", (1.3, num, den, x)),
        ("fir_apply", (taps, u)),
        ("iir_apply", (b, a, u, 1e9)),
        ("closed_loop", (b, a, loop_taps, 1.07, r, 1e9)),
        ("pade_eval", (d, z)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not HAS_NUMBA:
        raise SystemExit("numba unavailable (or FRACZERO_BACKEND=numpy); "
                         "nothing to compare")

    print(f"{'kernel':<16} {'numpy/python':>14} {'numba':>12} {'speedup':>9}")
    for name, call_args in make_cases():
        np_fn = kernels.IMPLEMENTATIONS["numpy"][name]
        nb_fn = kernels.IMPLEMENTATIONS["numba"][name]
        nb_fn(*call_args)  # compile outside the timing
        t_np = timeit(np_fn, call_args, args.repeats)
        t_nb = timeit(nb_fn, call_args, args.repeats)
        print(f"{name:<16} {t_np:>12.4f} s {t_nb:>10.4f} s {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
