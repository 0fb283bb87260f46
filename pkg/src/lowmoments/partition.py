"""Beurling-Selberg majorants and the smooth partition of unity built from them.

The bump ``g`` is the normalised convolution of a Selberg majorant ``b`` of
``1_{|u| <= 1/2}`` (Fourier support ``[-1/delta, 1/delta]``) with the same
indicator. It is evaluated through the primitive ``G(x) = int_{-inf}^x b``,
accumulated panel by panel with Gauss-Legendre quadrature, so that

    g(x) = (G(x + 1/2) - G(x - 1/2)) / (1 + delta)

is accurate to about 1e-10 absolute.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def trigamma(x):
    """psi'(x) for x >= 1: upward recurrence to x >= 10, then the asymptotic
    series (truncation error below 1e-16 relative there)."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    y = x.copy()
    for _ in range(10):
        low = y < 10
        if not low.any():
            break
        acc += np.where(low, 1.0 / (y * y), 0.0)
        y = np.where(low, y + 1.0, y)
    inv = 1.0 / y
    inv2 = inv * inv
    tail = 0.0
    for b in reversed(_BERNOULLI):
        tail = (tail + b) * inv2
    return acc + inv + 0.5 * inv2 + tail * inv


def _sin2_pi(z):
    # sin^2(pi z) with the argument reduced to [-1/2, 1/2] first
    return np.sin(np.pi * (z - np.round(z))) ** 2


def beurling_B(z):
    """Beurling's entire majorant of sgn(z) (exponential type 2*pi).

    Uses the trigamma closed form of the defining series
    ``(sin(pi z)/pi)^2 (sum_{n>=0} (z-n)^-2 - sum_{n>=1} (z+n)^-2 + 2/z)``.
    """
    z = np.asarray(z, dtype=float)
    w = np.abs(z)
    s2 = _sin2_pi(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc2 = np.where(w == 0, 1.0, s2 / (np.pi * w) ** 2)
    tri = trigamma(1.0 + w)
    pos = 1.0 + 2.0 * w * sinc2 - (2.0 / np.pi**2) * s2 * tri
    neg = -1.0 + 2.0 * sinc2 - 2.0 * w * sinc2 + (2.0 / np.pi**2) * s2 * tri
    out = np.where(z >= 0, pos, neg)
    return out if out.ndim else float(out)


def beurling_B_series(z, n_cut=1000):
    """Direct truncated series for B(z) with a midpoint-rule tail correction.

    Slow reference path; integers are mapped to the limits B(n) = sgn(n),
    B(0) = 1.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    n = np.arange(0, n_cut + 1, dtype=float)
    for i, zi in enumerate(z):
        if zi == round(zi):
            out[i] = 1.0 if zi >= 0 else -1.0
            continue
        s = np.sum(1.0 / (zi - n) ** 2) - np.sum(1.0 / (zi + n[1:]) ** 2) + 2.0 / zi
        edge = n_cut + 0.5
        s += 1.0 / (edge - zi) - 1.0 / (edge + zi)
        out[i] = (math.sin(math.pi * zi) / math.pi) ** 2 * s
    return out


def selberg_interval_majorant(a, b, Delta):
    """Selberg's majorant of 1_[a,b] with Fourier support [-Delta, Delta];
    its integral is (b - a) + 1/Delta."""

    def maj(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * (beurling_B(Delta * (u - a)) + beurling_B(Delta * (b - u)))

    return maj


def selberg_majorant(delta):
    """Majorant ``b >= 1_{|u| <= 1/2}`` with ``int b = 1 + delta``."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return selberg_interval_majorant(-0.5, 0.5, 1.0 / delta)


@dataclass(frozen=True)
class PartitionParams:
    delta: float
    N: int

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")

    def partition(self):
        return SmoothPartition.for_params(self.delta, int(self.N))


class _Primitive:
    """G(x) = int_{-inf}^x b(u) du for one delta.

    ``exact`` integrates panel by panel with Gauss-Legendre. ``__call__`` uses a
    cubic Hermite table (values of G, slopes b) with spacing delta/128 on
    |x| <= TABLE_EXTENT, error about h^4 max|b^(3)| / 384 < 1e-10, and falls
    back to ``exact`` outside it.
    """

    TABLE_EXTENT = 64.0
    REFINE = 128

    def __init__(self, delta):
        self.delta = float(delta)
        self.b = selberg_majorant(self.delta)
        self.h = min(0.25, self.delta / 2)
        self.cum = np.zeros(1)
        self._table = None

    def _panel(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        nodes = mid[..., None] + half[..., None] * _GL_NODES
        return half * np.sum(self.b(nodes) * _GL_WEIGHTS, axis=-1)

    def _extend(self, k):
        have = len(self.cum) - 1
        if k <= have:
            return
        k = max(k, 2 * have)
        edges = np.arange(have, k + 1) * self.h
        pieces = self._panel(edges[:-1], edges[1:])
        self.cum = np.concatenate([self.cum, self.cum[-1] + np.cumsum(pieces)])

    def exact(self, x):
        x = np.asarray(x, dtype=float)
        w = np.abs(x)
        k = np.floor(w / self.h).astype(np.int64)
        self._extend(int(k.max(initial=0)) + 1)
        right = self.cum[k] + self._panel(k * self.h, w)
        half = (1.0 + self.delta) / 2
        return np.where(x >= 0, half + right, half - right)

    def _build_table(self):
        hf = self.delta / self.REFINE
        n = int(np.ceil(self.TABLE_EXTENT / hf))
        grid = np.arange(n + 1) * hf
        pieces = self._panel(grid[:-1], grid[1:])
        vals = np.concatenate([[0.0], np.cumsum(pieces)])
        self._table = (hf, vals, self.b(grid))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self._table is None:
            self._build_table()
        hf, vals, slopes = self._table
        w = np.abs(x)
        inside = w < self.TABLE_EXTENT - hf
        k = np.minimum((w / hf).astype(np.int64), len(vals) - 2)
        t = w / hf - k
        t2, t3 = t * t, t * t * t
        right = (
            (2 * t3 - 3 * t2 + 1) * vals[k]
            + (t3 - 2 * t2 + t) * hf * slopes[k]
            + (-2 * t3 + 3 * t2) * vals[k + 1]
            + (t3 - t2) * hf * slopes[k + 1]
        )
        half = (1.0 + self.delta) / 2
        out = np.where(x >= 0, half + right, half - right)
        if not inside.all():
            out = np.where(inside, out, self.exact(np.where(inside, 0.0, x)))
        return out


@lru_cache(maxsize=32)
def _primitive(delta):
    return _Primitive(delta)


def g_eval(delta, x):
    """The bump g(x) of the partition of unity."""
    G = _primitive(float(delta))
    x = np.asarray(x, dtype=float)
    return (G(x + 0.5) - G(x - 0.5)) / (1.0 + delta)


class SmoothPartition:
    """The functions g_j(x) = g(x - j), |j| <= N, and the remainder g_{N+1}."""

    def __init__(self, delta, N):
        self.params = PartitionParams(delta, N)
        self.delta = float(delta)
        self.N = int(N)
        self._G = _primitive(self.delta)

    @classmethod
    @lru_cache(maxsize=32)
    def for_params(cls, delta, N):
        return cls(delta, N)

    @property
    def labels(self):
        """Cell labels in column order: -N..N then N+1."""
        return np.arange(-self.N, self.N + 2)

    def evaluate(self, x):
        """Array of shape x.shape + (2N+2,), columns ordered as ``labels``."""
        x = np.asarray(x, dtype=float)
        j = np.arange(-self.N, self.N + 1)
        edges = np.arange(-self.N - 0.5, self.N + 1.0)  # j - 1/2 and the last j + 1/2
        Gx = self._G(x[..., None] - edges)
        cells = (Gx[..., :-1] - Gx[..., 1:]) / (1.0 + self.delta)
        assert cells.shape[-1] == len(j)
        rest = 1.0 - np.sum(cells, axis=-1)
        return np.concatenate([cells, rest[..., None]], axis=-1)

    def cell(self, x, j):
        """g_j(x) for a single label j in -N..N+1."""
        if j == self.N + 1:
            return self.evaluate(x)[..., -1]
        if abs(j) > self.N:
            raise ValueError(f"cell label {j} outside -N..N+1")
        return g_eval(self.delta, np.asarray(x, dtype=float) - j)


def partition_eval(params, x):
    """(g_j(x) for |j| <= N, g_{N+1}(x))."""
    vals = params.partition().evaluate(x)
    return vals[..., :-1], vals[..., -1]


def derivative_bound(delta, l):
    return (2 * math.pi / delta) ** (l + 1) / (math.pi * (l + 1))


def derivative_bound_check(delta, l, grid, step=None):
    """max over ``grid`` of |g^(l)(x)| divided by (2pi/delta)^(l+1) / (pi (l+1)).

    Derivatives use the central difference stencil of order 2 in ``step``
    (default delta/40, a fraction of g's oscillation scale delta/(2pi)).
    """
    if l not in (1, 2, 3, 4):
        raise ValueError("l must be in 1..4")
    h = delta / 40 if step is None else float(step)
    grid = np.asarray(grid, dtype=float)
    if l == 1:
        stencil = {1: 0.5, -1: -0.5}
    elif l == 2:
        stencil = {1: 1.0, 0: -2.0, -1: 1.0}
    elif l == 3:
        stencil = {2: 0.5, 1: -1.0, -1: 1.0, -2: -0.5}
    else:
        stencil = {2: 1.0, 1: -4.0, 0: 6.0, -1: -4.0, -2: 1.0}
    deriv = sum(c * g_eval(delta, grid + s * h) for s, c in stencil.items()) / h**l
    return float(np.max(np.abs(deriv)) / derivative_bound(delta, l))


@dataclass(frozen=True)
class ConditioningPlan:
    L: float
    P: int
    M: int
    N: int
    delta: float
    feasible: bool


def select_parameters(x, r):
    """Conditioning parameters as a pure function of (x, r).

    ``feasible`` reports whether P^(6500 log^4.64 P loglog P) < r/x; it is
    essentially never true at computable sizes and is not enforced.
    """
    x, r = float(x), float(r)
    if not 1 <= x <= r:
        raise ValueError("need 1 <= x <= r")
    L = min(x, r / x)
    if L < 10:
        raise ValueError(f"L = min(x, r/x) = {L} < 10; no conditioning plan")
    bound = math.exp(math.log(L) ** (1 / 6))
    P = math.ceil(bound) - 1
    logP = math.log(P)
    M = 2 * math.ceil(logP**1.02)
    N = max(1, math.ceil(1.2 * math.log(logP)))
    delta = logP**-1.3
    lhs = 6500 * logP**4.64 * math.log(logP) * logP
    feasible = bool(lhs < math.log(r / x))
    return ConditioningPlan(L=L, P=P, M=M, N=N, delta=delta, feasible=feasible)
