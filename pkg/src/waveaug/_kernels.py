"""Hot filterbank kernels: numba-jitted loops with a pure-numpy fallback.

The numpy fallback accumulates filter taps in the same order as the jitted
loops, so both paths produce bit-identical output. Selection happens once at
import time:

* ``WAVEAUG_NO_NUMBA=1`` in the environment forces the numpy path;
* otherwise numba is used when importable, numpy when not.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

import os

import numpy as np


def _dwt_periodic_numpy(x, lo, hi):
    n = x.shape[0]
    half = n // 2
    ca = np.zeros(half)
    cd = np.zeros(half)
    pos = 2 * np.arange(half)
    for f in range(lo.shape[0]):
        v = x[(pos - f) % n]
        ca += v * lo[f]
        cd += v * hi[f]
    return ca, cd


def _dwt_periodic_loops(x, lo, hi):
    n = x.shape[0]
    half = n // 2
    taps = lo.shape[0]
    ca = np.zeros(half)
    cd = np.zeros(half)
    # f-major accumulation matches the numpy fallback bit for bit
    for f in range(taps):
        clo = lo[f]
        chi = hi[f]
        for i in range(half):
            v = x[(2 * i - f) % n]
            ca[i] += v * clo
            cd[i] += v * chi
    return ca, cd


def _idwt_periodic_numpy(ca, cd, lo_r, hi_r):
    half = ca.shape[0]
    n = 2 * half
    taps = lo_r.shape[0]
    y = np.zeros(n)
    base = 2 * np.arange(half)
    for f in range(taps):
        idx = (base + f - (taps - 1)) % n
        y[idx] += ca * lo_r[f] + cd * hi_r[f]
    return y


def _idwt_periodic_loops(ca, cd, lo_r, hi_r):
    half = ca.shape[0]
    n = 2 * half
    taps = lo_r.shape[0]
    y = np.zeros(n)
    for f in range(taps):
        clo = lo_r[f]
        chi = hi_r[f]
        for i in range(half):
            y[(2 * i + f - (taps - 1)) % n] += ca[i] * clo + cd[i] * chi
    return y


def _env_disabled():
    return os.environ.get("WAVEAUG_NO_NUMBA", "").strip().lower() not in ("", "0", "false")


NUMBA_ACTIVE = False
if not _env_disabled():
    try:
        from numba import njit

        NUMBA_ACTIVE = True
    except ImportError:
        NUMBA_ACTIVE = False

if NUMBA_ACTIVE:
    dwt_periodic = njit(cache=True)(_dwt_periodic_loops)
    idwt_periodic = njit(cache=True)(_idwt_periodic_loops)
else:
    dwt_periodic = _dwt_periodic_numpy
    idwt_periodic = _idwt_periodic_numpy
