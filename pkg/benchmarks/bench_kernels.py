#!/usr/bin/env python3
"""Benchmark the jitted kernels against their pure-numpy fallbacks.

Times the implicit-QL first-row eigensolver (numba) against the dense
LAPACK route (numpy fallback) over a size sweep, the windowed moment
recursion on both backends, and end-to-end spectral-measure sampling
throughput. Run after a warmup pass so JIT compilation is not counted.

Usage: python benchmarks/bench_kernels.py [--sizes 200,500,1000,2000]
"""

import argparse
import time

import numpy as np

from lagspec import _kernels
from lagspec._kernels import MAX_QL_SWEEPS, USING_NUMBA, _eigen_firstrow_numpy
from lagspec.ensembles import EnsembleParams, make_rng, sample_spectral_measure


def _time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _ql_solve(diag, off):
    n = diag.size
    d = diag.copy()
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros(n)
    z[0] = 1.0
    status = _kernels._ql_firstrow(d, e, z, MAX_QL_SWEEPS)
    assert status == 0
    return d, z * z


def bench_eigensolver(sizes):
    print("eigensolver: QL first-row (njit) vs dense LAPACK eigh (numpy fallback)")
    header = f"{'n':>6}  {'ql_njit (s)':>12}  {'numpy_eigh (s)':>14}  {'speedup':>8}  {'max |dw|':>10}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(0)
    for n in sizes:
        diag = rng.uniform(-1, 1, n)
        off = rng.uniform(0.5, 1.5, n - 1)
        t_np = _time(lambda: _eigen_firstrow_numpy(diag, off))
        if USING_NUMBA:
            _ql_solve(diag, off)  # warmup/compile
            t_ql = _time(lambda: _ql_solve(diag, off))
            lam_a, w_a = _ql_solve(diag, off)
            lam_b, w_b = _eigen_firstrow_numpy(diag, off)
            order = np.argsort(lam_a)
            drift = np.max(np.abs(np.sort(w_a[order]) - np.sort(w_b)))
            print(f"{n:>6}  {t_ql:>12.5f}  {t_np:>14.5f}  {t_np / t_ql:>7.1f}x  {drift:>10.2e}")
        else:
            print(f"{n:>6}  {'(numba off)':>12}  {t_np:>14.5f}")


def bench_moments(n, orders):
    print()
    print(f"windowed moments <e1, J^k e1> at n = {n}")
    rng = np.random.default_rng(1)
    diag = rng.uniform(-1, 1, n)
    off = rng.uniform(0.5, 1.5, n - 1)
    for order in orders:
        out = np.empty(order)
        if USING_NUMBA:
            _kernels._tridiag_moments_jit(diag, off, out)  # warmup
            t = _time(lambda: _kernels._tridiag_moments_jit(diag, off, out), repeats=20)
            backend = "njit"
        else:
            t = _time(lambda: _kernels.tridiag_moments(diag, off, order), repeats=20)
            backend = "numpy"
        print(f"  order {order:>2} [{backend}]: {t * 1e6:8.1f} us")


def bench_sampling(n, draws):
    print()
    backend = "numba QL" if USING_NUMBA else "numpy eigh"
    params = EnsembleParams(n, 2.0, float(n) ** 2)
    rng = make_rng(7)
    sample_spectral_measure(rng, params)  # warmup
    t0 = time.perf_counter()
    for _ in range(draws):
        sample_spectral_measure(rng, params)
    dt = time.perf_counter() - t0
    print(f"spectral-measure sampling at n = {n} ({backend}): "
          f"{draws / dt:.1f} draws/s ({dt / draws * 1e3:.2f} ms each)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000,2000")
    parser.add_argument("--sample-n", type=int, default=500)
    parser.add_argument("--sample-draws", type=int, default=50)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"numba active: {USING_NUMBA}")
    bench_eigensolver(sizes)
    bench_moments(2000, [4, 8, 20])
    bench_sampling(args.sample_n, args.sample_draws)


if __name__ == "__main__":
    main()
