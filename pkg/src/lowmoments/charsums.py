"""Character-side computations for a prime modulus.

Characters are indexed by k in [0, r-2] through chi_k(g^a) = e(k a / (r-1)),
so a weighted histogram over discrete-log classes followed by one transform
gives a quantity for every character at once. Character k is even iff k is
even.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .arith import liouville_upto, mobius_upto, multiplicative_values, sieve
from .estimate import MomentEstimate, check_q, power_q
from .partition import SmoothPartition
from .spectral import character_transform

THETA_EPS = 1e-18


@dataclass(frozen=True)
class CharacterSumTable:
    """``sums[k] = sum_{n<=x} c(n) chi_k(n)`` for every k in [0, r-2]."""

    r: int
    x: int
    coeffs: str
    sums: np.ndarray = field(repr=False)


def coefficient_values(x, coeffs):
    """Return (label, c) with c an array of length x+1 holding c(0..x), c(0)=0.

    ``coeffs`` is "unit", "mobius", "liouville", an array of c(1..x) (length x
    or x+1 with entry 0 ignored), or a callable h(p, a) giving the values of a
    multiplicative function on prime powers (|h| <= 1 is checked on the primes
    actually used).
    """
    x = int(x)
    if isinstance(coeffs, str):
        if coeffs == "unit":
            c = np.ones(x + 1)
        elif coeffs in ("mobius", "liouville"):
            table = sieve(max(x, 2))
            fn = mobius_upto if coeffs == "mobius" else liouville_upto
            c = fn(x, table).astype(float)
        else:
            raise ValueError(f"unknown coefficients {coeffs!r}")
        c[0] = 0.0
        return coeffs, c
    if callable(coeffs):
        table = sieve(max(x, 2))
        c = multiplicative_values(x, table, coeffs)
        if np.any(np.abs(c[1:]) > 1 + 1e-12):
            raise ValueError("multiplicative coefficients must have modulus <= 1")
        return "custom", c
    arr = np.asarray(coeffs)
    if arr.ndim != 1 or len(arr) not in (x, x + 1):
        raise ValueError(f"coefficient array must have length x or x+1 (x={x})")
    c = np.zeros(x + 1, dtype=np.result_type(arr, float))
    c[1:] = arr[-x:]
    return "custom", c


def _histogram(ctx, n, weights):
    """Deposit ``weights`` at dlog[n mod r] (n coprime to r)."""
    idx = ctx.dlog[np.asarray(n, dtype=np.int64) % ctx.r]
    weights = np.asarray(weights)
    L = ctx.order
    if np.iscomplexobj(weights):
        return np.bincount(idx, weights.real, L) + 1j * np.bincount(idx, weights.imag, L)
    return np.bincount(idx, weights, L).astype(float)


def bulk_character_sums(ctx, x, coeffs="unit"):
    x = int(x)
    if x >= ctx.r:
        raise ValueError(f"x={x} must be below r={ctx.r} (sums are r-periodic)")
    if x < 1:
        raise ValueError("x must be >= 1")
    label, c = coefficient_values(x, coeffs)
    n = np.arange(1, x + 1)
    sums = character_transform(_histogram(ctx, n, c[1:]))
    return CharacterSumTable(r=ctx.r, x=x, coeffs=label, sums=sums)


def naive_character_sums(ctx, x, coeffs="unit", block=256):
    """O(r x) reference: each chi_k(n) from the exact integer phase k*dlog[n]."""
    x = int(x)
    if x >= ctx.r:
        raise ValueError(f"x={x} must be below r={ctx.r}")
    label, c = coefficient_values(x, coeffs)
    L = ctx.order
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    d = ctx.dlog[1 : x + 1]
    cv = c[1:]
    sums = np.empty(L, dtype=complex)
    for start in range(0, L, block):
        k = np.arange(start, min(start + block, L), dtype=np.int64)
        phase = np.outer(k, d) % L
        sums[start : start + len(k)] = roots[phase] @ cv
    return CharacterSumTable(r=ctx.r, x=x, coeffs=label, sums=sums)


def empirical_moment(table, q, exclude_principal=False):
    """Exact average of |S|^{2q} over all characters (or the non-principal ones)."""
    q = check_q(q)
    sums = table.sums[1:] if exclude_principal else table.sums
    vals = power_q(np.abs(sums) ** 2, q)
    return MomentEstimate(
        q=q, value=float(np.sum(vals) / len(vals)), std_error=0.0,
        n_samples=len(vals), method="exact-average",
    )


def character_parity_direct(ctx, k):
    """chi_k(-1) computed from dlog[r-1]; +1 for even, -1 for odd."""
    L = ctx.order
    val = np.exp(2j * np.pi * ((int(k) * int(ctx.dlog[ctx.r - 1])) % L) / L)
    return int(round(val.real))


def parity_indices(ctx, parity):
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    return np.arange(0 if parity == "even" else 1, ctx.order, 2)


def theta_cutoff(r, eps=THETA_EPS):
    return math.ceil(math.sqrt(r * math.log(1 / eps) / math.pi)) + 1


def theta_values(ctx, parity, K=None):
    """theta(1, chi_k) for every k of the given parity, in increasing k.

    Even: sum chi(n) exp(-pi n^2/r); odd: sum n chi(n) exp(-pi n^2/r), both
    truncated at n <= K (terms with r | n vanish).
    """
    idx = parity_indices(ctx, parity)
    K = theta_cutoff(ctx.r) if K is None else int(K)
    n = np.arange(1, K + 1)
    n = n[n % ctx.r != 0]
    w = np.exp(-np.pi * n.astype(float) ** 2 / ctx.r)
    if parity == "odd":
        w = n * w
    return character_transform(_histogram(ctx, n, w))[idx]


def theta_direct(ctx, parity, K=None):
    """Per-character summation reference for ``theta_values``."""
    idx = parity_indices(ctx, parity)
    K = theta_cutoff(ctx.r) if K is None else int(K)
    n = np.arange(1, K + 1)
    n = n[n % ctx.r != 0]
    w = np.exp(-np.pi * n.astype(float) ** 2 / ctx.r)
    if parity == "odd":
        w = n * w
    d = ctx.dlog[n % ctx.r]
    L = ctx.order
    out = np.empty(len(idx), dtype=complex)
    for i, k in enumerate(idx):
        out[i] = np.sum(w * np.exp(2j * np.pi * ((int(k) * d) % L) / L))
    return out


def theta_moment(values, q, r):
    """(1/(r-1)) * sum over the parity class of |theta|^{2q}."""
    q = check_q(q)
    vals = power_q(np.abs(np.asarray(values)) ** 2, q)
    return MomentEstimate(
        q=q, value=float(np.sum(vals) / (int(r) - 1)), std_error=0.0,
        n_samples=len(vals), method="exact-average",
    )


def loglog10(L):
    return math.log(math.log(10 * L))


def tail_fraction(table, lam, normalized=True):
    """Fraction of characters with |S| >= threshold.

    The threshold is lam*sqrt(x)/loglog(10L)^{1/4} with L = min(x, r/x), or
    plain lam*sqrt(x) when ``normalized`` is false.
    """
    if table.coeffs != "unit":
        raise ValueError("tail fractions are defined for unit coefficients")
    if lam < 2:
        raise ValueError("lambda must be >= 2")
    thresh = lam * math.sqrt(table.x)
    if normalized:
        thresh /= loglog10(min(table.x, table.r / table.x)) ** 0.25
    return float(np.count_nonzero(np.abs(table.sums) >= thresh) / len(table.sums))


def grid_scale(P):
    """log^{1.01} P, the inverse spacing of the t-net for prime sums up to P."""
    return math.log(P) ** 1.01


def _per_prime(a, primes, default):
    if a is None:
        a = default
    if callable(a):
        return np.array([a(int(p)) for p in primes], dtype=complex)
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return np.full(len(primes), complex(a))
    if len(a) != len(primes):
        raise ValueError(f"expected {len(primes)} per-prime coefficients, got {len(a)}")
    return a


def prime_sum_weights(primes, P, k, a1=None, a2=None):
    """Weights (w1, w2) with S_k = Re sum_p (w1[p] chi(p) + w2[p] chi(p^2))."""
    primes = np.asarray(primes)
    a1 = _per_prime(a1, primes, 1.0)
    a2 = _per_prime(a2, primes, 0.5)
    if np.any(np.abs(a1) > 1 + 1e-12) or np.any(np.abs(a2) > 1 + 1e-12):
        raise ValueError("prime-sum coefficients must have modulus <= 1")
    theta = k / grid_scale(P)
    logp = np.log(primes.astype(float))
    w1 = a1 * np.exp(-(0.5 + 1j * theta) * logp)
    w2 = a2 * np.exp(-(1.0 + 2j * theta) * logp)
    return w1, w2


def prime_sums_char(ctx, P, k, a1=None, a2=None, primes=None):
    """S_k(chi) = Re sum_{p<=P} (a1(p) chi(p) p^{-1/2-i k/l} + a2(p) chi(p^2) p^{-1-2ik/l})
    for every character, l = log^{1.01} P. Defaults a1 = 1, a2 = 1/2."""
    P = int(P)
    if P >= ctx.r:
        raise ValueError(f"P={P} must be below r={ctx.r}")
    if primes is None:
        primes = sieve(max(P, 2)).primes_upto(P)
    w1, w2 = prime_sum_weights(primes, P, k, a1, a2)
    p = np.asarray(primes, dtype=np.int64)
    hist = _histogram(ctx, p, w1) + _histogram(ctx, p * p, w2)
    return character_transform(hist).real


class PolynomialMomentCheck(NamedTuple):
    char_side: complex
    rmf_side: float
    abs_diff: float


def steinhaus_polynomial_moment(coeffs, m1, m2):
    """E (sum c_p f(p))^{m1} conj(sum c_p f(p))^{m2} for Steinhaus f.

    Nonzero only when m1 == m2 = m, where it is the sum over multisets mu of
    size m of multinomial(m; mu)^2 * prod |c_p|^{2 mu_p}.
    """
    if m1 != m2:
        return 0.0
    c2 = np.abs(np.asarray(coeffs, dtype=complex)) ** 2
    m = int(m1)
    total = 0.0
    for combo in itertools.combinations_with_replacement(range(len(c2)), m):
        mult = Counter(combo)
        coef = math.factorial(m)
        for e in mult.values():
            coef //= math.factorial(e)
        total += coef**2 * float(np.prod([c2[i] ** e for i, e in mult.items()]))
    return total


def polynomial_moment_check(ctx, P, a, m1, m2):
    """Character average of Q^{m1} conj(Q)^{m2}, Q = sum_{p<=P} a(p) chi(p)/sqrt(p),
    against the Steinhaus expectation of the same polynomial."""
    P, m1, m2 = int(P), int(m1), int(m2)
    if m1 < 0 or m2 < 0:
        raise ValueError("exponents must be nonnegative")
    top = P ** max(m1, m2)
    if top >= ctx.r:
        raise ValueError(f"P^max(m1,m2) = {top} is not below r = {ctx.r}")
    primes = sieve(max(P, 2)).primes_upto(P)
    a = _per_prime(a, primes, 1.0)
    c = a / np.sqrt(primes.astype(float))
    Q = character_transform(_histogram(ctx, primes, c))
    char_side = complex(np.mean(Q**m1 * np.conj(Q) ** m2))
    rmf_side = steinhaus_polynomial_moment(c, m1, m2)
    return PolynomialMomentCheck(char_side, rmf_side, abs(char_side - rmf_side))


class ConditionedAverage(NamedTuple):
    """sigma_j and the conditional mean of the target; ``value`` is None for an
    empty cell (sigma below 1e-300)."""

    sigma: float
    value: object


EMPTY_CELL = 1e-300


def conditioning_weights(partition, S, j):
    """prod_i g_{j(i)}(S[i]) for S of shape (2M+1, n) and labels j of length 2M+1."""
    j = np.asarray(j, dtype=np.int64)
    if S.shape[0] != len(j):
        raise ValueError("need one label per prime sum")
    cols = j + partition.N
    if np.any(cols < 0) or np.any(cols > 2 * partition.N + 1):
        raise ValueError(f"labels must lie in -N..N+1 (N={partition.N})")
    w = np.ones(S.shape[1])
    for i in range(len(j)):
        w *= partition.evaluate(S[i])[:, cols[i]]
    return w


def conditioned_average_char(ctx, P, params, j, x=None, weight="window", a1=None, a2=None):
    """sigma_j = E^char prod_i g_{j(i)}(S_i(chi)) over i in [-M, M] (M from len(j)),
    and the conditioned mean of |sum_{n<=x} chi(n)|^2 (window) or of 1 (unit)."""
    j = np.asarray(j, dtype=np.int64)
    if len(j) % 2 != 1:
        raise ValueError("label vector must have odd length 2M+1")
    M = len(j) // 2
    primes = sieve(max(int(P), 2)).primes_upto(P)
    S = np.stack([prime_sums_char(ctx, P, i, a1, a2, primes) for i in range(-M, M + 1)])
    w = conditioning_weights(SmoothPartition.for_params(params.delta, params.N), S, j)
    sigma = float(np.mean(w))
    if sigma < EMPTY_CELL:
        return ConditionedAverage(sigma, None)
    if weight == "unit":
        return ConditionedAverage(sigma, 1.0)
    if weight != "window":
        raise ValueError("weight must be 'unit' or 'window'")
    if x is None:
        raise ValueError("window weight needs x")
    target = np.abs(bulk_character_sums(ctx, x).sums) ** 2
    return ConditionedAverage(sigma, float(np.mean(w * target)) / sigma)
