import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lowmoments.estimate import MomentEstimate, check_q, mc_estimate, power_q
from lowmoments.limits import CAPS, CapacityError, check_cap


def test_invariants():
    MomentEstimate(0.5, 1.0, 0.0, 10, "exact-average")
    MomentEstimate(0.5, 1.0, 0.0, 10, "quadrature")
    with pytest.raises(ValueError):
        MomentEstimate(0.5, 1.0, 0.1, 10, "exact-average")
    with pytest.raises(ValueError):
        MomentEstimate(1.5, 1.0, 0.0, 10, "monte-carlo")
    with pytest.raises(ValueError):
        MomentEstimate(0.5, -1.0, 0.0, 10, "monte-carlo")
    with pytest.raises(ValueError):
        MomentEstimate(0.5, 1.0, 0.0, 10, "guess")
    with pytest.raises(ValueError):
        check_q(-0.1)


def test_mc_estimate_matches_definition():
    x = np.array([1.0, 2.0, 4.0, 7.0])
    est = mc_estimate(x, 1.0)
    assert est.value == 3.5 and math.isclose(est.std_error, np.std(x, ddof=1) / 2)
    with pytest.raises(ValueError):
        mc_estimate([1.0], 1.0)


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=50), st.floats(0, 1))
def test_power_q(vals, q):
    v = np.array(vals)
    out = power_q(v, q)
    if q == 0:
        assert np.all(out == 1)
    else:
        assert np.allclose(out, v**q)


def test_caps():
    check_cap(10, 10, "n")
    with pytest.raises(CapacityError):
        check_cap(11, 10, "n")
    assert CAPS.modulus == 20_000_000
