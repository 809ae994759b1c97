"""Micro-benchmark: numba kernels against their pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--trials 200000] [--candidates 500]

Both paths must return identical values; the script asserts that before
printing timings, so a speedup number is only ever shown for matching
implementations.  The compiled path pays off in the per-trial decode
loop; the difference-box search is memory-friendly enough that the
vectorized fallback holds its own there.
"""

import argparse
import time

import numpy as np

from iadof._kernels import (
    HAS_NUMBA,
    _min_abs_numpy,
    _nearest_numpy,
)


def time_call(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best * 1000.0, out


def bench_nearest(trials, candidates):
    rng = np.random.default_rng(0)
    y = rng.normal(size=trials)
    values = np.sort(rng.normal(size=candidates))
    print(f"nearest_candidate_indices: {trials} trials x {candidates} candidates")

    ms_np, out_np = time_call(_nearest_numpy, y, values)
    print(f"  numpy : {ms_np:8.2f} ms")
    if HAS_NUMBA:
        from iadof._kernels import _nearest_numba

        _nearest_numba(y[:8], values)  # warm up the JIT
        ms_nb, out_nb = time_call(_nearest_numba, y, values)
        assert np.array_equal(out_np, out_nb)
        print(f"  numba : {ms_nb:8.2f} ms   ({ms_np / ms_nb:.1f}x)")


def bench_min_abs(radius, directions):
    rng = np.random.default_rng(1)
    gains = rng.normal(size=directions)
    radii = np.full(directions, radius, dtype=np.int64)
    box = int(np.prod(2 * radii + 1))
    print(f"min_abs_combination: {directions} directions, radius {radius}"
          f" ({box} points)")

    ms_np, out_np = time_call(_min_abs_numpy, gains, radii, 2)
    print(f"  numpy : {ms_np:8.2f} ms")
    if HAS_NUMBA:
        from iadof._kernels import _min_abs_numba

        _min_abs_numba(gains[:2], radii[:2], 1)  # warm up the JIT
        ms_nb, out_nb = time_call(_min_abs_numba, gains, radii, 2)
        assert out_np == out_nb
        print(f"  numba : {ms_nb:8.2f} ms   ({ms_np / ms_nb:.1f}x)")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=200000)
    p.add_argument("--candidates", type=int, default=500)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--directions", type=int, default=8)
    args = p.parse_args()

    if not HAS_NUMBA:
        print("numba not installed; showing numpy timings only")
    bench_nearest(args.trials, args.candidates)
    bench_min_abs(args.radius, args.directions)


if __name__ == "__main__":
    main()
