"""Zeta sums sum_{n<=x} n^{it}, their t-moments, and the smoothed t-average."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .estimate import MomentEstimate, check_q, mc_estimate, power_q
from .limits import CAPS
from .partition import selberg_interval_majorant
from .rmf import map_chunks, uniforms

_GL = np.polynomial.legendre.leggauss(20)
BLOCK = 256


def _check_phase(x, t):
    big = float(np.max(np.abs(np.atleast_1d(t)))) * math.log(x) if x > 1 else 0.0
    if big > CAPS.zeta_phase:
        raise ValueError(f"|t| log x = {big:.3g} exceeds {CAPS.zeta_phase:.3g}; phases would lose accuracy")


def dirichlet_poly(coeffs, t):
    """sum_n a_n n^{it} at each t (a_n for n = 1..len(coeffs))."""
    a = np.asarray(coeffs, dtype=complex)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_phase(len(a), t)
    logn = np.log(np.arange(1, len(a) + 1, dtype=float))
    out = np.empty(len(t), dtype=complex)
    for s in range(0, len(t), BLOCK):
        out[s : s + BLOCK] = np.exp(1j * np.outer(t[s : s + BLOCK], logn)) @ a
    return out


def zeta_partial_sum(x, t):
    """sum_{n<=x} n^{it}; the phase t log n carries absolute error ~ |t| log x ulp."""
    x = int(x)
    if x < 1:
        raise ValueError("x must be >= 1")
    return complex(dirichlet_poly(np.ones(x), [t])[0])


@dataclass(frozen=True)
class TAverageSpec:
    """How to average over t in [0, T].

    monte-carlo: ``n_points`` uniform t from the counter-based stream of
    ``seed``; quadrature: composite 20-point Gauss-Legendre with panels short
    enough that the mean node spacing is <= 0.1/log x (``n_points`` unused).
    """

    T: float
    mode: str = "monte-carlo"
    n_points: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.T < 10:
            raise ValueError("T must be >= 10")
        if self.mode not in ("monte-carlo", "quadrature"):
            raise ValueError("mode must be 'monte-carlo' or 'quadrature'")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")


def quadrature_nodes(T, x):
    """Nodes and weights of the composite rule on [0, T] (weights sum to T)."""
    nodes, weights = _GL
    panel = min(0.5, 0.1 * len(nodes) / math.log(max(x, 2)))
    n_panels = math.ceil(T / panel)
    edges = np.linspace(0.0, T, n_panels + 1)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    return (mid[:, None] + half[:, None] * nodes).ravel(), (half[:, None] * weights).ravel()


def t_samples(spec):
    return spec.T * uniforms(spec.seed, 0, spec.n_points)


def _abs2_values(coeffs, t, threads=1):
    t = np.asarray(t)

    def block(idx):
        return np.abs(dirichlet_poly(coeffs, t[idx])) ** 2

    return map_chunks(block, len(t), threads, chunk=4096)


def t_moment(coeffs, spec, q, threads=1):
    """(1/T) int_0^T |sum a_n n^{it}|^{2q} dt per ``spec``."""
    q = check_q(q)
    x = len(coeffs)
    if spec.mode == "monte-carlo":
        vals = power_q(_abs2_values(coeffs, t_samples(spec), threads), q)
        return mc_estimate(vals, q)
    t, w = quadrature_nodes(spec.T, x)
    vals = power_q(_abs2_values(coeffs, t, threads), q)
    value = float(np.sum(w * vals) / spec.T)
    return MomentEstimate(q=q, value=value, std_error=0.0, n_samples=len(t), method="quadrature")


def zeta_moment(x, spec, q, threads=1):
    x = int(x)
    if not 1 <= x <= spec.T:
        raise ValueError("need 1 <= x <= T")
    return t_moment(np.ones(x), spec, q, threads)


def pair_sum_mean_square(coeffs, T):
    """Exact (1/T) int_0^T |sum a_n n^{it}|^2 dt =
    sum |a_n|^2 + sum_{m != n} a_n conj(a_m) (e^{iT log(n/m)} - 1) / (iT log(n/m))."""
    a = np.asarray(coeffs, dtype=complex)
    logn = np.log(np.arange(1, len(a) + 1, dtype=float))
    total = float(np.sum(np.abs(a) ** 2))
    for i in range(len(a)):
        d = logn[i] - logn[:i]
        if len(d) == 0:
            continue
        kern = np.expm1(1j * T * d) / (1j * T * d)
        cross = a[i] * np.conj(a[:i]) * kern
        total += 2.0 * float(np.sum(cross.real))
    return total


class MeanValueCheck(NamedTuple):
    numeric: float
    exact: float
    rel_diff: float


def mv_mean_value_check(x, T, coeffs=None, mode="quadrature", n_points=10_000, seed=0):
    """Numeric t-average of |sum a_n n^{it}|^2 against the exact pair sum."""
    a = np.ones(int(x)) if coeffs is None else np.asarray(coeffs, dtype=complex)
    spec = TAverageSpec(T=T, mode=mode, n_points=n_points, seed=seed)
    numeric = t_moment(a, spec, 1.0).value
    exact = pair_sum_mean_square(a, T)
    return MeanValueCheck(numeric, exact, abs(numeric - exact) / abs(exact))


class SmoothedAverage(NamedTuple):
    value: complex
    tail_bound: float


SMOOTH_SUPPORT = 1.0 / (2 * math.pi)


def smoothed_average(T, U, V, c_tail=1000.0, panel=None):
    """Phi-weighted average of (U/V)^{it}:

        (T Phi^(0))^-1 int Phi(t/T) (U/V)^{it} dt
        = Phi^(0)^-1 int Phi(u) exp(i u T log(U/V)) du,

    with Phi the Selberg majorant of 1_[0,1] whose Fourier transform lives in
    [-1/(2 pi), 1/(2 pi)], so Phi^(0) = 1 + 2 pi. The u-integral is truncated
    to |u - 1/2| <= c_tail; ``tail_bound`` bounds the dropped mass, using
    Phi(u) <= 1.25 / (Delta pi d)^2 at distance d from [0, 1] (from
    B(z) - 1 <= 1/(pi z)^2 and B(-z) + 1 <= 1.5/(pi z)^2 for z >= 1/2).
    """
    if not (1 <= U < T and 1 <= V < T):
        raise ValueError("need 1 <= U, V < T")
    phi = selberg_interval_majorant(0.0, 1.0, SMOOTH_SUPPORT)
    norm = 1.0 + 1.0 / SMOOTH_SUPPORT
    omega = T * math.log(U / V)
    if panel is None:
        panel = min(0.5, math.pi / max(abs(omega), 1.0))
    n_panels = math.ceil(2 * c_tail / panel)
    edges = np.linspace(0.5 - c_tail, 0.5 + c_tail, n_panels + 1)
    nodes, weights = _GL
    total = 0.0 + 0.0j
    for s in range(0, n_panels, 4096):
        e = min(s + 4096, n_panels)
        lo, hi = edges[s:e], edges[s + 1 : e + 1]
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        u = (mid[:, None] + half[:, None] * nodes).ravel()
        w = (half[:, None] * weights).ravel()
        total += np.sum(w * phi(u) * np.exp(1j * omega * u))
    scale = 1.25 / (SMOOTH_SUPPORT**2 * math.pi**2)
    tail = 2 * scale / (c_tail - 0.5)
    return SmoothedAverage(complex(total / norm), tail / norm)
