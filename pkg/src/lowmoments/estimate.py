from dataclasses import dataclass

import numpy as np

METHODS = ("exact-average", "monte-carlo", "quadrature")


@dataclass(frozen=True)
class MomentEstimate:
    """A 2q-th moment average with its uncertainty.

    Exact averages always carry ``std_error == 0``. Quadrature results and
    degenerate Monte Carlo cases (q = 0) may also report zero error.
    """

    q: float
    value: float
    std_error: float
    n_samples: int
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q={self.q} outside [0, 1]")
        if self.value < 0 or self.std_error < 0:
            raise ValueError("moment value and standard error must be nonnegative")
        if self.method == "exact-average" and self.std_error != 0:
            raise ValueError("exact averages carry zero standard error")


def check_q(q):
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    return q


def mc_estimate(samples, q):
    """Mean and standard error of a vector of per-sample values."""
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    if n < 2:
        raise ValueError("need at least two samples")
    mean = float(np.sum(samples) / n)
    se = float(np.std(samples, ddof=1) / np.sqrt(n))
    return MomentEstimate(q=q, value=mean, std_error=se, n_samples=n, method="monte-carlo")


def power_q(abs_sq, q):
    """|S|^{2q} from |S|^2, with the convention 0^0 = 1."""
    if q == 0:
        return np.ones_like(abs_sq, dtype=float)
    return np.power(abs_sq, q)
