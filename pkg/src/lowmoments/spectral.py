"""Arbitrary-length DFT by Bluestein's chirp-z reduction.

Convention: ``dft(x)[k] = sum_a x[a] * exp(-2j*pi*k*a/L)`` and ``idft`` is its
exact inverse (carrying the 1/L factor). Rounding error grows like
O(log L * ulp * ||x||), well inside the O(sqrt(L) ulp) budget the oracle tests
enforce.
"""

import numpy as np

NAIVE_MAX = 4096


def _chirp(L):
    # n^2 reduced mod 2L keeps the phase argument small and exact
    n = np.arange(L, dtype=np.int64)
    return np.exp(-1j * np.pi * ((n * n) % (2 * L)) / L)


def dft(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("dft expects a non-empty 1-d sequence")
    L = len(x)
    if L == 1:
        return x.copy()
    w = _chirp(L)
    M = 1 << (2 * L - 2).bit_length()
    a = np.zeros(M, dtype=complex)
    a[:L] = x * w
    b = np.zeros(M, dtype=complex)
    b[:L] = np.conj(w)
    b[M - L + 1 :] = np.conj(w[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    return w * conv[:L]


def idft(X):
    X = np.asarray(X, dtype=complex)
    return np.conj(dft(np.conj(X))) / len(X)


def naive_dft(x, sign=-1):
    """O(L^2) reference transform, summing row by row."""
    x = np.asarray(x, dtype=complex)
    L = len(x)
    a = np.arange(L, dtype=np.int64)
    out = np.empty(L, dtype=complex)
    for k in range(L):
        out[k] = np.sum(x * np.exp(sign * 2j * np.pi * ((k * a) % L) / L))
    return out


def naive_idft(X):
    return naive_dft(X, sign=+1) / len(X)


def character_transform(hist):
    """``out[k] = sum_a hist[a] * e(k a / L)``: the sum of a weighted
    discrete-log histogram against every character at once."""
    return np.conj(dft(np.conj(np.asarray(hist, dtype=complex))))
