"""Bound shapes: the right-hand sides of the moment bounds with their
unspecified absolute constants dropped. Natural logarithms throughout.

    thm1, thm3   (x / (1 + (1-q) sqrt(loglog(10L))))^q,  L = min(x, r/x)
    thm2         same with L = min(x, T/x)
    cor1         min(log lam, sqrt(loglog(10L))) / lam^2
    cor2-even    (sqrt(r) / (1 + (1-q) sqrt(loglog r)))^q
    cor2-odd     (r^{3/2} / (1 + (1-q) sqrt(loglog r)))^q
    helson       (x / (1 + (1-q) sqrt(loglog x)))^q
    chaos        (log P / (1 + (1-q) sqrt(loglog P)))^q
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

NAMES = ("thm1", "thm2", "thm3", "cor1", "cor2-even", "cor2-odd", "helson", "chaos")

_REQUIRED = {
    "thm1": ("x", "r", "q"),
    "thm2": ("x", "T", "q"),
    "thm3": ("x", "r", "q"),
    "cor1": ("x", "r", "lam"),
    "cor2-even": ("r", "q"),
    "cor2-odd": ("r", "q"),
    "helson": ("x", "q"),
    "chaos": ("P", "q"),
}


@dataclass(frozen=True)
class BoundShape:
    name: str
    inputs: dict = field(hash=False)
    value: float


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def _saving(q, inner):
    return 1.0 + (1.0 - q) * math.sqrt(math.log(math.log(inner)))


def bound(name, params=None, **kwargs):
    """Evaluate a shape; parameters come as a dict, keywords, or both."""
    params = {**(params or {}), **kwargs}
    if name not in NAMES:
        raise ValueError(f"unknown bound {name!r}; expected one of {NAMES}")
    missing = [k for k in _REQUIRED[name] if k not in params]
    _require(not missing, f"{name} needs parameters {missing}")
    p = {k: float(params[k]) for k in _REQUIRED[name]}
    if "q" in p:
        _require(0.0 <= p["q"] <= 1.0, "constraint 0 <= q <= 1 violated")
    if name in ("thm1", "thm3", "thm2", "cor1"):
        top = p["T"] if name == "thm2" else p["r"]
        label = "T" if name == "thm2" else "r"
        _require(1.0 <= p["x"] <= top, f"constraint 1 <= x <= {label} violated")
        L = min(p["x"], top / p["x"])
        if name == "cor1":
            _require(p["lam"] >= 2.0, "constraint lambda >= 2 violated")
            lam = p["lam"]
            value = min(math.log(lam), math.sqrt(math.log(math.log(10 * L)))) / lam**2
        else:
            value = (p["x"] / _saving(p["q"], 10 * L)) ** p["q"]
    elif name in ("cor2-even", "cor2-odd"):
        _require(p["r"] > math.e, "constraint r > e violated")
        base = math.sqrt(p["r"]) if name == "cor2-even" else p["r"] ** 1.5
        value = (base / _saving(p["q"], p["r"])) ** p["q"]
    elif name == "helson":
        _require(p["x"] > math.e, "constraint x > e violated")
        value = (p["x"] / _saving(p["q"], p["x"])) ** p["q"]
    else:
        _require(p["P"] > math.e, "constraint P > e violated")
        value = (math.log(p["P"]) / _saving(p["q"], p["P"])) ** p["q"]
    return BoundShape(name, p, value)


class RatioRecord(NamedTuple):
    name: str
    estimate: float
    std_error: float
    bound_value: float
    ratio: float
    ratio_se: float


def ratio_report(estimate, shape):
    """estimate.value / shape.value with the standard error scaled alike."""
    return RatioRecord(shape.name, estimate.value, estimate.std_error, shape.value,
                       estimate.value / shape.value, estimate.std_error / shape.value)
