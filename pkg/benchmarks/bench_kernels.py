#!/usr/bin/env python3
"""Benchmark the numba-jitted filterbank kernels against the numpy fallback.

Runs each kernel on representative workloads (full decompose/reconstruct
passes over 2x1024 frames at several depths and bases) and prints a small
table. The jitted path is what ``waveaug`` uses by default when numba is
importable; WAVEAUG_NO_NUMBA=1 selects the fallback at import time.
"""

import time

import numpy as np

from waveaug import _kernels as kernels
from waveaug import wavelets as wv


def time_fn(fn, *args, repeat=200):
    fn(*args)  # warm up (and trigger JIT compilation)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def bench_pair(basis_name, length):
    b = wv.basis(basis_name)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(length)
    rows = []
    jitted = kernels.dwt_periodic if kernels.NUMBA_ACTIVE else None
    t_np = time_fn(kernels._dwt_periodic_numpy, x, b.lo_d, b.hi_d)
    t_jit = time_fn(jitted, x, b.lo_d, b.hi_d) if jitted else float("nan")
    rows.append(("dwt", t_np, t_jit))
    ca, cd = kernels._dwt_periodic_numpy(x, b.lo_d, b.hi_d)
    jitted = kernels.idwt_periodic if kernels.NUMBA_ACTIVE else None
    t_np = time_fn(kernels._idwt_periodic_numpy, ca, cd, b.lo_r, b.hi_r)
    t_jit = time_fn(jitted, ca, cd, b.lo_r, b.hi_r) if jitted else float("nan")
    rows.append(("idwt", t_np, t_jit))
    return rows


def bench_roundtrip(basis_name, depth, repeat=100):
    rng = np.random.default_rng(1)
    frame = rng.standard_normal((2, 1024))
    wv.reconstruct(wv.decompose(frame, basis_name, depth))
    start = time.perf_counter()
    for _ in range(repeat):
        wv.reconstruct(wv.decompose(frame, basis_name, depth))
    return (time.perf_counter() - start) / repeat


def main():
    print(f"numba active: {kernels.NUMBA_ACTIVE}")
    print(f"{'kernel':<16}{'numpy (us)':>12}{'numba (us)':>12}{'speedup':>9}")
    for name in ("haar", "db5", "coif3"):
        for op, t_np, t_jit in bench_pair(name, 1024):
            speed = t_np / t_jit if t_jit == t_jit else float("nan")
            print(f"{name + ':' + op:<16}{t_np * 1e6:>12.1f}{t_jit * 1e6:>12.1f}{speed:>8.1f}x")
    print()
    print(f"{'round trip (2x1024, active path)':<36}{'us':>10}")
    for name in ("haar", "db5", "coif3"):
        for depth in (1, 3, 5):
            t = bench_roundtrip(name, depth)
            print(f"{name + ' E=' + str(depth):<36}{t * 1e6:>10.1f}")


if __name__ == "__main__":
    main()
