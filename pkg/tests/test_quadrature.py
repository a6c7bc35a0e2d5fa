import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subordination.errors import NumericalError
from subordination.quadrature import (NODES, WEIGHTS_G, WEIGHTS_K, adaptive, gk15, integrate_log, power_head,
                                      power_tail)


def test_rule_tables():
    assert WEIGHTS_K.sum() == pytest.approx(2.0, abs=1e-15)
    assert WEIGHTS_G.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.allclose(NODES, -NODES[::-1])
    # Kronrod 15 is exact to degree 22, Gauss 7 to degree 13
    assert WEIGHTS_K @ NODES ** 22 == pytest.approx(2 / 23, rel=1e-13)
    assert WEIGHTS_G @ NODES ** 12 == pytest.approx(2 / 13, rel=1e-13)


def test_gk15_on_polynomials():
    k, e = gk15(lambda x: x ** 5 + 1, np.array([0.0]), np.array([2.0]))
    assert k[0] == pytest.approx(2 ** 6 / 6 + 2, rel=1e-14)
    assert e[0] < 1e-12


@given(st.floats(0.1, 20.0))
def test_adaptive_exponential(a):
    q = adaptive(lambda x: np.exp(-a * x), [0.0, 5.0], rel_tol=1e-12)
    assert q.converged
    assert q.value == pytest.approx(-math.expm1(-5 * a) / a, rel=1e-11)


def test_adaptive_kink_breakpoint():
    q = adaptive(lambda x: np.abs(x - 0.3), [0.0, 0.3, 1.0], rel_tol=1e-13)
    assert q.value == pytest.approx(0.045 + 0.245, rel=1e-13)
    assert q.n_panels == 2


def test_adaptive_panel_cap():
    q = adaptive(lambda x: np.sin(1 / (x + 1e-4)), [0.0, 1.0], rel_tol=1e-14, max_panels=60)
    assert not q.converged


def test_adaptive_nonfinite():
    with pytest.raises(NumericalError):
        adaptive(lambda x: np.where(x > 0.5, np.inf, 1.0), [0.0, 1.0])


@given(st.floats(-0.9, 3.0), st.floats(-6, 0), st.floats(0, 6))
def test_integrate_log_powers(p, lo, hi):
    a, b = 10.0 ** lo, 10.0 ** hi
    q = integrate_log(lambda t: t ** p, a, b, rel_tol=1e-12)
    exact = (b ** (p + 1) - a ** (p + 1)) / (p + 1)
    assert q.value == pytest.approx(exact, rel=1e-10)


def test_head_and_tail_closed_forms():
    assert power_head(0.5 ** -0.5, 0.5, -0.5) == pytest.approx(2 * math.sqrt(0.5))
    assert power_tail(2.0 ** -3, 2.0, -3.0) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        power_head(1.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        power_tail(1.0, 1.0, -1.0)
