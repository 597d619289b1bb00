"""Float64 brute-force summation kernels.

These are the long direct sums used as independent oracles (millions of
terms, compensated summation). Each kernel has a numba ``@njit`` version and
a pure-numpy version; the numpy path is used when numba is missing or when
``HYPERLIM_DISABLE_NUMBA`` is set to a non-empty value other than ``0``.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "NUMBA_AVAILABLE",
    "USE_NUMBA",
    "direct_zeta3",
    "direct_e_series",
    "direct_lemma1",
    "direct_half_tail",
    "numba_kernels",
    "numpy_kernels",
]

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    NUMBA_AVAILABLE = False

_flag = os.environ.get("HYPERLIM_DISABLE_NUMBA", "")
USE_NUMBA = NUMBA_AVAILABLE and _flag in ("", "0")

_CHUNK = 1 << 20


def _fsum_chunks(make_terms, n: int, start: int = 1) -> float:
    """Correctly rounded sum of terms ``start..n`` built chunkwise."""
    partials = []
    for lo in range(start, n + 1, _CHUNK):
        hi = min(n, lo + _CHUNK - 1)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        partials.append(math.fsum(make_terms(k)))
    return math.fsum(partials)


# numpy versions

def _np_zeta3(n):
    return _fsum_chunks(lambda k: 1.0 / (k * k * k), n)


def _np_e_series(M, s, alpha, n):
    def terms(k):
        q = np.exp(-2.0 * alpha * k)
        return (-np.expm1(-2.0 * alpha * k)) / (1.0 + q) ** M * np.exp(-2.0 * s * alpha * k) / k
    return _fsum_chunks(terms, n)


def _np_lemma1(N, c, K):
    def terms(k):
        out = np.ones_like(k)
        for j in range(1, N + 2):
            out /= 2.0 * k + j + c
        return out
    return _fsum_chunks(terms, K)


def _np_half_tail(N, K):
    return _fsum_chunks(lambda k: -np.log1p(-0.25 / (k * k)), K, start=N + 1)


numpy_kernels = {
    "zeta3": _np_zeta3,
    "e_series": _np_e_series,
    "lemma1": _np_lemma1,
    "half_tail": _np_half_tail,
}


# numba versions (Neumaier compensated summation, ascending index)

if NUMBA_AVAILABLE:

    @numba.njit(cache=True, nogil=True)
    def _nb_zeta3(n):
        total = 0.0
        comp = 0.0
        for i in range(1, n + 1):
            k = float(i)
            t = 1.0 / (k * k * k)
            s = total + t
            if abs(total) >= abs(t):
                comp += (total - s) + t
            else:
                comp += (t - s) + total
            total = s
        return total + comp

    @numba.njit(cache=True, nogil=True)
    def _nb_e_series(M, s, alpha, n):
        total = 0.0
        comp = 0.0
        for i in range(1, n + 1):
            k = float(i)
            q = math.exp(-2.0 * alpha * k)
            t = (-math.expm1(-2.0 * alpha * k)) / (1.0 + q) ** M * math.exp(-2.0 * s * alpha * k) / k
            u = total + t
            if abs(total) >= abs(t):
                comp += (total - u) + t
            else:
                comp += (t - u) + total
            total = u
        return total + comp

    @numba.njit(cache=True, nogil=True)
    def _nb_lemma1(N, c, K):
        total = 0.0
        comp = 0.0
        for i in range(1, K + 1):
            k = float(i)
            t = 1.0
            for j in range(1, N + 2):
                t /= 2.0 * k + j + c
            u = total + t
            if abs(total) >= abs(t):
                comp += (total - u) + t
            else:
                comp += (t - u) + total
            total = u
        return total + comp

    @numba.njit(cache=True, nogil=True)
    def _nb_half_tail(N, K):
        total = 0.0
        comp = 0.0
        for i in range(N + 1, K + 1):
            k = float(i)
            t = -math.log1p(-0.25 / (k * k))
            u = total + t
            if abs(total) >= abs(t):
                comp += (total - u) + t
            else:
                comp += (t - u) + total
            total = u
        return total + comp

    numba_kernels = {
        "zeta3": _nb_zeta3,
        "e_series": _nb_e_series,
        "lemma1": _nb_lemma1,
        "half_tail": _nb_half_tail,
    }
else:  # pragma: no cover
    numba_kernels = {}

_active = numba_kernels if USE_NUMBA else numpy_kernels


def direct_zeta3(n: int) -> float:
    """sum_{k=1}^{n} 1/k^3 in float64."""
    return float(_active["zeta3"](int(n)))


def direct_e_series(M: int, s: int, alpha: float, n: int) -> float:
    """First ``n`` terms of the e-series summand in float64."""
    return float(_active["e_series"](int(M), int(s), float(alpha), int(n)))


def direct_lemma1(N: int, c: float, K: int) -> float:
    """sum_{k=1}^{K} prod_{j=1}^{N+1} 1/(2k + j + c) in float64."""
    return float(_active["lemma1"](int(N), float(c), int(K)))


def direct_half_tail(N: int, K: int) -> float:
    """sum_{k=N+1}^{K} -log(1 - 1/(4k^2)) in float64."""
    return float(_active["half_tail"](int(N), int(K)))
