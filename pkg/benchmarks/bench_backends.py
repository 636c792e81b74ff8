"""Timing comparison of the persistence backends.

Runs the degree-0/1 reduction on sliding-window clouds of a synthetic
bubble series (the package's hot path) with both the compiled kernel
and the pure-Python fallback, prints per-window timings and the
speedup, and cross-checks that outputs agree bitwise.

Usage: python benchmarks/bench_backends.py [n_windows]
"""

import sys
import time

import numpy as np

from bubbletda.embedding import delay_embed, sliding_windows
from bubbletda.lppls import LpplsParams, SyntheticConfig, generate_synthetic
from bubbletda.persistence import _fallback, enclosing_radius, pairwise_distances

try:
    from bubbletda.persistence import _kernel
except ImportError:
    _kernel = None


def window_clouds(n_windows):
    params = LpplsParams(
        tc=637.0, m=0.3003, omega=6.889, A=11.11,
        B=-2.937e-4, C1=4.372e-5, C2=-3.362e-5,
    )
    series = generate_synthetic(params, SyntheticConfig(n_points=637))
    points = delay_embed(series, dim=4, delay=5)
    windows = sliding_windows(points, 72)
    step = max(1, len(windows) // n_windows)
    return [np.ascontiguousarray(pairwise_distances(w)) for w in windows[::step][:n_windows]]


def run(backend, dists):
    results = []
    start = time.perf_counter()
    for dist in dists:
        results.append(backend.rips_h0_h1(dist, enclosing_radius(dist)))
    return time.perf_counter() - start, results


def main():
    n_windows = int(sys.argv[1]) if len(sys.argv) > 1 else 25
    dists = window_clouds(n_windows)
    print(f"{len(dists)} windows of 72 points in R^4")

    py_time, py_results = run(_fallback, dists)
    print(f"python fallback: {py_time:.2f}s total, {1e3 * py_time / len(dists):.1f} ms/window")

    if _kernel is None:
        print("compiled kernel not built; nothing to compare")
        return

    cy_time, cy_results = run(_kernel, dists)
    print(f"cython kernel:   {cy_time:.2f}s total, {1e3 * cy_time / len(dists):.1f} ms/window")
    print(f"speedup: {py_time / cy_time:.1f}x")

    for a, b in zip(py_results, cy_results):
        assert a[1] == b[1]
        for x, y in zip((a[0], a[2], a[3], a[4]), (b[0], b[2], b[3], b[4])):
            assert np.array_equal(np.asarray(x), np.asarray(y))
    print("outputs identical across backends")


if __name__ == "__main__":
    main()
