"""Random Euler products F_P(s) = prod_{p<=P} (1 - f(p) p^-s)^-1 and their
t-averages on the critical line.

log F is accumulated as sum_p -log(1 - f(p) p^-s). Primes up to
``EXACT_PRIME_LIMIT`` use the principal log1p directly; for larger primes
|f(p) p^-s| <= p^-Re(s) is small and the power series sum_k z^k / k is
evaluated as a handful of matrix products, truncated once the remaining terms
fall below 1e-17 in total.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .arith import sieve
from .estimate import MomentEstimate, check_q, mc_estimate, power_q
from .rmf import map_chunks, phases_for

EXACT_PRIME_LIMIT = 200
SERIES_TOL = 1e-17
CHUNK = 256
_GL8 = np.polynomial.legendre.leggauss(8)


class OutsideRegimeWarning(UserWarning):
    """A parameter lies outside the range where the cited bound is stated."""


def _series_terms(n_primes, p0, sigma):
    k = 1
    while n_primes * p0 ** (-sigma * (k + 1)) / (k + 1) / (1 - p0**-sigma) > SERIES_TOL:
        k += 1
    return k


def log_euler(vals, primes, s):
    """log F(s) for each row of ``vals`` (values on ``primes``) and each s.

    Returns shape (rows, len(s)).
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s.real <= 0):
        raise ValueError("Euler products need Re(s) > 0")
    vals = np.atleast_2d(vals)
    primes = np.asarray(primes)
    logp = np.log(primes.astype(float))
    out = np.zeros((vals.shape[0], len(s)), dtype=complex)
    n_small = int(np.searchsorted(primes, EXACT_PRIME_LIMIT, side="right"))
    for i in range(n_small):
        out -= np.log1p(-vals[:, i, None] * np.exp(-s * logp[i])[None, :])
    if n_small < len(primes):
        big = vals[:, n_small:]
        lp = logp[n_small:]
        terms = _series_terms(len(lp), float(primes[n_small]), float(s.real.min()))
        power = big.copy()
        for k in range(1, terms + 1):
            out += (power @ np.exp(-k * np.outer(lp, s))) / k
            if k < terms:
                power *= big
    return out


def euler_product_at(sample, P, s):
    """F_P(s) for one RmfSample (empty product 1 when P < 2)."""
    s = complex(s)
    if s.real <= 0:
        raise ValueError("Euler products need Re(s) > 0")
    if P > sample.prime_limit:
        raise ValueError(f"P={P} exceeds the sample's prime limit {sample.prime_limit}")
    m = int(np.searchsorted(sample.primes, P, side="right"))
    if m == 0:
        return 1.0 + 0j
    return complex(np.exp(log_euler(sample.values[None, :m], sample.primes[:m], [s])[0, 0]))


def mertens_product(P, sigma=1.0):
    """prod_{p<=P} (1 - p^-sigma)^-1; at sigma = 1 this is E|F_P(1/2 + it)|^2."""
    primes = sieve(max(int(P), 2)).primes_upto(P).astype(float)
    return float(np.exp(-np.sum(np.log1p(-(primes**-sigma)))))


@dataclass(frozen=True)
class EulerGrid:
    """The t-net k * spacing, |k| <= K, and |F_P(1/2 + i k spacing)|^2 per sample.

    ``convention="exact"`` uses spacing 1/l and K = floor(l/2) with
    l = log^{1.01} P; ``"rounded"`` uses spacing 1/ceil(l) and K = ceil(l/2).
    """

    P: int
    spacing: float
    K: int
    values: np.ndarray = field(default=None, repr=False)

    @property
    def k_range(self):
        return np.arange(-self.K, self.K + 1)

    @classmethod
    def for_prime_limit(cls, P, convention="exact"):
        l = math.log(P) ** 1.01
        if convention == "exact":
            return cls(int(P), 1.0 / l, math.floor(l / 2))
        if convention == "rounded":
            return cls(int(P), 1.0 / math.ceil(l), math.ceil(l / 2))
        raise ValueError("convention must be 'exact' or 'rounded'")


def _primes(P):
    return sieve(max(int(P), 2)).primes_upto(P)


def euler_grid(P, n_samples, seed, convention="exact", threads=1):
    """EulerGrid with |F|^2 on the net for samples 0..n_samples-1."""
    grid = EulerGrid.for_prime_limit(P, convention)
    primes = _primes(P)
    s = 0.5 + 1j * grid.k_range * grid.spacing

    def block(indices):
        return np.abs(np.exp(log_euler(phases_for(seed, indices, len(primes)), primes, s))) ** 2

    values = map_chunks(block, n_samples, threads, CHUNK)
    return EulerGrid(grid.P, grid.spacing, grid.K, values)


def _flag_q(q):
    if q < 2 / 3:
        warnings.warn(f"q={q} is below 2/3, outside the range of the chaos bound",
                      OutsideRegimeWarning, stacklevel=3)


def discrete_averages(P, n_samples, seed, convention="exact", threads=1):
    """Per-sample spacing * sum_{|k|<=K} |F(1/2 + i k spacing)|^2."""
    grid = euler_grid(P, n_samples, seed, convention, threads)
    return grid.spacing * grid.values.sum(axis=1)


def chaos_discrete_moment(P, q, n_samples, seed, convention="exact", threads=1):
    q = check_q(q)
    _flag_q(q)
    D = discrete_averages(P, n_samples, seed, convention, threads)
    return mc_estimate(power_q(D, q), q)


def discrete_mean_exact(P, convention="exact"):
    """E of the discrete average: (2K+1) * spacing * prod (1 - 1/p)^-1."""
    grid = EulerGrid.for_prime_limit(P, convention)
    return (2 * grid.K + 1) * grid.spacing * mertens_product(P)


def default_quad_step(P):
    return 1.0 / (10.0 * math.log(P))


def integral_averages(P, n_samples, seed, quad_step=None, threads=1):
    """Per-sample midpoint-rule value of int_{-1/2}^{1/2} |F(1/2 + it)|^2 dt."""
    limit = default_quad_step(P)
    h = limit if quad_step is None else float(quad_step)
    if h > limit * (1 + 1e-12):
        raise ValueError(f"quad_step={h} exceeds 1/(10 log P) = {limit}")
    n = math.ceil(1.0 / h)
    t = -0.5 + (np.arange(n) + 0.5) / n
    primes = _primes(P)
    s = 0.5 + 1j * t

    def block(indices):
        F2 = np.abs(np.exp(log_euler(phases_for(seed, indices, len(primes)), primes, s))) ** 2
        return F2.sum(axis=1) / n

    return map_chunks(block, n_samples, threads, CHUNK)


def chaos_integral_moment(P, q, n_samples, seed, quad_step=None, threads=1):
    q = check_q(q)
    _flag_q(q)
    return mc_estimate(power_q(integral_averages(P, n_samples, seed, quad_step, threads), q), q)


class DefectEstimate(NamedTuple):
    value: float
    std_error: float
    n_samples: int
    mean_square: float
    ratio: float
    ratio_se: float


def _defect_nodes(grid, k_max):
    K = grid.K if k_max is None else int(k_max)
    centers = np.arange(-K, K + 1) * grid.spacing
    x, w = _GL8
    half = grid.spacing / 2
    return centers, half * x, half * w


def defect_samples(P, n_samples, seed, k_max=None, convention="exact", threads=1):
    """Per-sample sum_{|k|<=K} int_{|t|<=spacing/2} |F(s_k + it) - F(s_k)|^2 dt,
    s_k = 1/2 + i k spacing, with 8-point Gauss-Legendre on each cell."""
    grid = EulerGrid.for_prime_limit(P, convention)
    centers, offs, wts = _defect_nodes(grid, k_max)
    tt = (centers[:, None] + np.concatenate([[0.0], offs])[None, :]).ravel()
    primes = _primes(P)
    s = 0.5 + 1j * tt
    shape = (len(centers), len(offs) + 1)

    def block(indices):
        F = np.exp(log_euler(phases_for(seed, indices, len(primes)), primes, s))
        F = F.reshape(len(indices), *shape)
        diff2 = np.abs(F[:, :, 1:] - F[:, :, :1]) ** 2
        return (diff2 @ wts).sum(axis=1)

    return map_chunks(block, n_samples, threads, CHUNK)


def discretization_defect(P, n_samples, seed, k_max=None, convention="exact", threads=1):
    """Monte Carlo defect with its ratio to E|F_P(1/2)|^2 = prod (1 - 1/p)^-1."""
    d = defect_samples(P, n_samples, seed, k_max, convention, threads)
    est = mc_estimate(d, 1.0)
    e0 = mertens_product(P)
    return DefectEstimate(est.value, est.std_error, est.n_samples, e0,
                          est.value / e0, est.std_error / e0)


def expected_defect(P, k_max=None, convention="exact", nodes=64):
    """Exact expectation of the defect:
    (2K+1) int_{|t|<=spacing/2} (2 E0 - 2 Re prod_p (1 - p^{-1-it})^-1) dt."""
    grid = EulerGrid.for_prime_limit(P, convention)
    K = grid.K if k_max is None else int(k_max)
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = grid.spacing / 2
    t = half * x
    logp = np.log(_primes(P).astype(float))
    cross = np.exp(-np.sum(np.log1p(-np.exp(-np.outer(1 + 1j * t, logp))), axis=1))
    e0 = mertens_product(P)
    return (2 * K + 1) * half * float(np.sum(w * (2 * e0 - 2 * cross.real)))


class ParsevalCheck(NamedTuple):
    lhs: float
    rhs: float
    rel_diff: float
    tail_bound: float


def parseval_check(coeffs, sigma, t_max, panel=0.5, nodes=16):
    """Both sides of int_1^inf |sum_{n<=u} a_n|^2 u^{-1-2 sigma} du
    = (1/2 pi) int |A(sigma+it)/(sigma+it)|^2 dt for a finite a_1..a_nmax.

    The left side is exact (S is a step function); the right side is composite
    Gauss-Legendre on [-t_max, t_max]. ``tail_bound`` = B^2/(pi t_max) with
    B = sum |a_n| n^-sigma bounds the part of the right side beyond t_max.
    """
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    a = np.asarray(coeffs, dtype=complex)
    n = np.arange(1, len(a) + 1, dtype=float)
    S2 = np.abs(np.cumsum(a)) ** 2
    shell = n ** (-2 * sigma)
    shell[:-1] -= (n[1:]) ** (-2 * sigma)
    lhs = float(np.sum(S2 * shell) / (2 * sigma))

    n_panels = max(1, math.ceil(2 * t_max / panel))
    edges = np.linspace(-t_max, t_max, n_panels + 1)
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    t = (mid[:, None] + half[:, None] * x).ravel()
    wt = (half[:, None] * w).ravel()
    logn = np.log(n)
    amp = a * n ** (-sigma)
    total = 0.0
    for start in range(0, len(t), 8192):
        tb = t[start : start + 8192]
        A = np.exp(-1j * np.outer(tb, logn)) @ amp
        total += float(np.sum(wt[start : start + 8192] * np.abs(A) ** 2 / (sigma**2 + tb**2)))
    rhs = total / (2 * math.pi)
    B = float(np.sum(np.abs(amp)))
    diff = abs(lhs - rhs)
    rel = diff / lhs if lhs > 0 else (0.0 if diff == 0 else math.inf)
    return ParsevalCheck(lhs, rhs, rel, B**2 / (math.pi * t_max))
