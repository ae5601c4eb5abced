#!/usr/bin/env python3
"""Throughput comparison: compiled fast path vs the NumPy reference.

Run after building the extension:

    python benchmarks/bench_backends.py
"""

import math
import time

import numpy as np

from abkit import _ref

try:
    from abkit import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeats=7):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.0, 12.0, 200_000)
    s = rng.uniform(0.0, 30.0, 200_000)
    w = np.exp(-0.35j) * rng.uniform(0.0, 5.0, 200_000)
    cd, sd = math.cos(0.7 + math.pi), math.sin(0.7 + math.pi)
    cases = [
        ("jnu_series_batch", (1.7, x)),
        ("inu_series_batch", (0.5, s)),
        ("b_alpha_batch", (0.5, cd, sd, s)),
        ("b_alpha_contour_batch", (0.5, cd, sd, w)),
    ]
    print(f"{'kernel':26s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, args in cases:
        ref_t = timeit(getattr(_ref, name), *args)
        if _fast is None:
            print(f"{name:26s} {ref_t * 1e3:9.2f}ms {'n/a':>10s}")
            continue
        fast_t = timeit(getattr(_fast, name), *args)
        dev = np.max(
            np.abs(
                np.asarray(getattr(_ref, name)(*args))
                - np.asarray(getattr(_fast, name)(*args))
            )
        )
        print(
            f"{name:26s} {ref_t * 1e3:9.2f}ms {fast_t * 1e3:9.2f}ms "
            f"{ref_t / fast_t:7.2f}x   (max dev {dev:.1e})"
        )


if __name__ == "__main__":
    main()
