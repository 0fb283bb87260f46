"""Prime sieves, factorisation tables, primitive roots and discrete logarithms."""

from dataclasses import dataclass, field

import numpy as np

from .limits import CAPS, check_cap

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        y = pow(a, d, n)
        if y in (1, n - 1):
            continue
        for _ in range(s - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` plus the smallest-prime-factor array.

    ``spf[n]`` is defined for ``0 <= n <= limit`` with ``spf[0] = 0`` and
    ``spf[1] = 1`` as sentinels.
    """

    limit: int
    primes: np.ndarray = field(repr=False)
    spf: np.ndarray = field(repr=False)

    def prime_index(self):
        """Array mapping a prime p to its position in ``primes`` (-1 otherwise)."""
        idx = np.full(self.limit + 1, -1, dtype=np.int64)
        idx[self.primes] = np.arange(len(self.primes))
        return idx

    def primes_upto(self, y):
        return self.primes[: np.searchsorted(self.primes, y, side="right")]


def sieve(limit, cap=None):
    """Smallest-prime-factor sieve of Eratosthenes up to ``limit``."""
    limit = int(limit)
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    check_cap(limit, CAPS.sieve_limit if cap is None else cap, "sieve limit")
    dtype = np.int32 if limit < 2**31 - 1 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    n = np.arange(limit + 1, dtype=dtype)
    unset = spf == 0
    spf[unset] = n[unset]
    spf[1] = 1
    primes = np.flatnonzero(spf[2:] == n[2:]).astype(np.int64) + 2
    return PrimeTable(limit=limit, primes=primes, spf=spf)


def factorize(n, table):
    """Return ``[(p, a), ...]`` with p strictly increasing and prod p**a == n."""
    n = int(n)
    if n < 1 or n > table.limit:
        raise ValueError(f"n={n} outside table range 1..{table.limit}")
    out = []
    while n > 1:
        p = int(table.spf[n])
        a = 0
        while n % p == 0:
            n //= p
            a += 1
        out.append((p, a))
    return out


def _trial_factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def find_primitive_root(r):
    """Smallest generator of the multiplicative group mod the prime r."""
    r = int(r)
    if not is_prime(r):
        raise ValueError(f"{r} is not prime")
    if r == 2:
        return 1
    cofactors = [(r - 1) // q for q, _ in _trial_factor(r - 1)]
    for g in range(2, r):
        if all(pow(g, c, r) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class ModulusContext:
    """Prime modulus with generator ``g`` and the index tables.

    ``pow[a] = g**a mod r`` for ``0 <= a <= r-2`` and ``dlog[n]`` inverts it on
    ``1 <= n <= r-1``; ``dlog[0]`` is -1.
    """

    r: int
    g: int
    dlog: np.ndarray = field(repr=False)
    pow: np.ndarray = field(repr=False)

    @property
    def order(self):
        return self.r - 1


def build_modulus_context(r, cap=None):
    r = int(r)
    check_cap(r, CAPS.modulus if cap is None else cap, "modulus r")
    g = find_primitive_root(r)
    L = r - 1
    # repeated multiplication by g, done in doubling blocks: block[m:2m] = block[:m] * g^m
    table = np.ones(1, dtype=np.int64)
    while len(table) < L:
        step = pow(g, len(table), r)
        table = np.concatenate([table, table * step % r])
    table = table[:L]
    dlog = np.full(r, -1, dtype=np.int64)
    dlog[table] = np.arange(L)
    return ModulusContext(r=r, g=g, dlog=dlog, pow=table)


def mobius_upto(x, table):
    """mu(n) for 0 <= n <= x (entry 0 is 0)."""
    x = int(x)
    mu = np.ones(x + 1, dtype=np.int8)
    mu[0] = 0
    for p in table.primes_upto(x):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def liouville_upto(x, table):
    """lambda(n) = (-1)^Omega(n) for 0 <= n <= x (entry 0 is 0)."""
    x = int(x)
    omega = np.zeros(x + 1, dtype=np.int64)
    m = np.arange(2, x + 1)
    n = m.copy()
    while len(m):
        omega[n] += 1
        m = m // table.spf[m]
        keep = m > 1
        m, n = m[keep], n[keep]
    lam = np.where(omega % 2 == 0, 1, -1).astype(np.int8)
    lam[0] = 0
    return lam


def multiplicative_values(x, table, h):
    """Values c(1..x) of the multiplicative function with c(p**a) = h(p, a).

    Returned array has length x+1 with c[0] = 0.
    """
    x = int(x)
    c = np.zeros(x + 1, dtype=complex)
    c[1] = 1.0
    spf = table.spf
    for n in range(2, x + 1):
        p = int(spf[n])
        m, a = n, 0
        while m % p == 0:
            m //= p
            a += 1
        c[n] = c[m] * complex(h(p, a))
    return c
