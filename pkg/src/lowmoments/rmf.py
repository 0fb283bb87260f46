"""Steinhaus random multiplicative functions.

Randomness is counter based: sample ``index`` under master ``seed`` owns the
Philox stream keyed by (seed, index), and the phase of the i-th prime is the
i-th draw of that stream. Samples are therefore independent of each other, of
the chunking and thread count used to evaluate them, and consistent across
prime limits (a longer table only appends primes).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .arith import sieve
from .charsums import conditioning_weights, prime_sum_weights, EMPTY_CELL
from .estimate import MomentEstimate, check_q, mc_estimate, power_q
from .limits import CAPS, check_cap
from .partition import SmoothPartition

CHUNK = 32


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def uniforms(seed, index, count):
    """The first ``count`` draws of the stream for (seed, index), in [0, 1)."""
    key = check_seed(seed) | (int(index) << 64)
    return np.random.Generator(np.random.Philox(key=key)).random(count)


def phases_for(seed, indices, count):
    """Unit-circle values, shape (len(indices), count)."""
    u = np.stack([uniforms(seed, i, count) for i in indices]) if len(indices) else np.zeros((0, count))
    return np.exp(2j * np.pi * u)


@dataclass(frozen=True)
class RmfSample:
    """f(p) for every prime p <= prime_limit, in the order of ``primes``."""

    seed: int
    index: int
    prime_limit: int
    primes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def value_at(self, p):
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            raise ValueError(f"{p} is not a sampled prime")
        return self.values[i]


def sample_rmf(table, seed, index=0):
    values = phases_for(seed, [index], len(table.primes))[0]
    return RmfSample(seed=check_seed(seed), index=int(index), prime_limit=table.limit,
                     primes=table.primes, values=values)


class _Plan(NamedTuple):
    """Evaluation order for f on 1..x: n = p * m with p = spf(n), grouped by
    the number of prime factors so each group only reads earlier groups."""

    x: int
    primes: np.ndarray
    levels: list
    gpf: np.ndarray


@lru_cache(maxsize=8)
def _plan(x):
    x = int(x)
    check_cap(x, CAPS.rmf_length, "sum length x")
    table = sieve(max(x, 2))
    spf = table.spf[: x + 1].astype(np.int64)
    primes = table.primes_upto(x)
    omega = np.zeros(x + 1, dtype=np.int64)
    gpf = np.ones(x + 1, dtype=np.int64)
    gpf[0] = 0
    omega[primes] = 1
    gpf[primes] = primes
    levels = []
    n = np.arange(2, x + 1)
    n = n[spf[n] != n]
    level = 2
    while len(n):
        co = n // spf[n]
        ready = omega[co] == level - 1
        idx = n[ready]
        sp, cf = spf[idx], idx // spf[idx]
        omega[idx] = level
        gpf[idx] = np.maximum(sp, gpf[cf])
        levels.append((idx, sp, cf))
        n = n[~ready]
        level += 1
    return _Plan(x, primes, levels, gpf)


def _f_block(plan, vals):
    """f(0..x) for a block of samples: vals has shape (b, #primes <= x);
    result has shape (x+1, b)."""
    b = vals.shape[0]
    F = np.zeros((plan.x + 1, b), dtype=complex)
    F[1] = 1.0
    F[plan.primes] = vals[:, : len(plan.primes)].T
    for idx, sp, cf in plan.levels:
        F[idx] = F[sp] * F[cf]
    return F


def f_values(sample, x):
    """f(0..x) for one sample (f(0) = 0)."""
    x = int(x)
    if x > sample.prime_limit:
        raise ValueError(f"x={x} exceeds the sample's prime limit {sample.prime_limit}")
    return _f_block(_plan(x), sample.values[None, :])[:, 0]


def evaluate_sum(sample, x):
    return complex(np.sum(f_values(sample, x)[1:]))


def smooth_restricted_sum(sample, x, P):
    """Sum of f(n) over P-smooth n <= x."""
    x = int(x)
    f = f_values(sample, x)
    keep = _plan(x).gpf[1:] <= P
    return complex(np.sum(f[1:][keep]))


def prime_sums_from_values(vals, primes, P, k, a1=None, a2=None):
    """S_k(f) for each row of ``vals`` (values on ``primes``, restricted to p <= P)."""
    primes = np.asarray(primes)
    m = int(np.searchsorted(primes, P, side="right"))
    w1, w2 = prime_sum_weights(primes[:m], P, k, a1, a2)
    v = vals[..., :m]
    return (v @ w1 + (v * v) @ w2).real


def prime_sums_rmf(sample, P, k, a1=None, a2=None):
    if P > sample.prime_limit:
        raise ValueError(f"P={P} exceeds the sample's prime limit {sample.prime_limit}")
    return float(prime_sums_from_values(sample.values, sample.primes, P, k, a1, a2))


def map_chunks(fn, n_samples, threads=1, chunk=CHUNK):
    """Apply fn(indices) to fixed-size index chunks and concatenate in order."""
    starts = range(0, int(n_samples), chunk)
    blocks = [np.arange(s, min(s + chunk, n_samples)) for s in starts]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            parts = list(pool.map(fn, blocks))
    else:
        parts = [fn(b) for b in blocks]
    return np.concatenate(parts, axis=0)


def rmf_sums(x, n_samples, seed, threads=1):
    """sum_{n<=x} f(n) for samples 0..n_samples-1 under ``seed``."""
    plan = _plan(x)
    n_primes = len(plan.primes)

    def block(indices):
        return _f_block(plan, phases_for(seed, indices, n_primes))[1:].sum(axis=0)

    return map_chunks(block, n_samples, threads)


def moment_from_sums(sums, q):
    q = check_q(q)
    return mc_estimate(power_q(np.abs(sums) ** 2, q), q)


def rmf_moment(x, q, n_samples, seed, threads=1):
    """Monte Carlo estimate of E |sum_{n<=x} f(n)|^{2q}."""
    check_q(q)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    return moment_from_sums(rmf_sums(x, n_samples, seed, threads), q)


class ConditionedRmf(NamedTuple):
    sigma: float
    sigma_se: float
    value: object
    value_se: object


def conditioned_average_rmf(P, params, j, x, n_samples, seed, weight="window",
                            a1=None, a2=None, threads=1):
    """Monte Carlo sigma^rand_j = E prod_i g_{j(i)}(S_i(f)) and the conditioned
    mean of |sum_{n<=x} f(n)|^2 (window) or of 1 (unit).

    The conditioned mean is a ratio estimator; its standard error comes from
    the delta method, sd(y - R w) / (sqrt(n) mean(w)).
    """
    j = np.asarray(j, dtype=np.int64)
    if len(j) % 2 != 1:
        raise ValueError("label vector must have odd length 2M+1")
    if weight not in ("unit", "window"):
        raise ValueError("weight must be 'unit' or 'window'")
    M = len(j) // 2
    limit = max(int(x), int(P), 2)
    plan = _plan(limit)
    primes = plan.primes
    part = SmoothPartition.for_params(params.delta, params.N)

    def block(indices):
        vals = phases_for(seed, indices, len(primes))
        S = np.stack([prime_sums_from_values(vals, primes, P, i, a1, a2) for i in range(-M, M + 1)])
        w = conditioning_weights(part, S, j)
        if weight == "window":
            F = _f_block(plan, vals)
            y = np.abs(F[1 : int(x) + 1].sum(axis=0)) ** 2
        else:
            y = np.ones_like(w)
        return np.stack([w, w * y], axis=1)

    wy = map_chunks(block, n_samples, threads)
    w, y = wy[:, 0], wy[:, 1]
    n = len(w)
    sigma = float(np.mean(w))
    sigma_se = float(np.std(w, ddof=1) / math.sqrt(n))
    if sigma < EMPTY_CELL:
        return ConditionedRmf(sigma, sigma_se, None, None)
    R = float(np.mean(y)) / sigma
    se = float(np.std(y - R * w, ddof=1) / math.sqrt(n) / sigma)
    return ConditionedRmf(sigma, sigma_se, R, se)
