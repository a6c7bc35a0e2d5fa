import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subordination.errors import ConfigError, DomainError
from subordination.families import CARPET_D, CARPET_WALK, GASKET_D, GASKET_WALK, gasket_dimensions
from subordination.scales import (ScaleSpec, VolumeProfile, bisect_inverse, check_scale_order, eval_scale,
                                  invert_scale, log_grid, min_scale, verify_LU, verify_VD)

P, W = ScaleSpec.power, ScaleSpec.piecewise
exponent = st.floats(0.2, 4.0)


def builtin_specs():
    return [P(2.0), P(GASKET_WALK), P(0.5), W(2.5, 2.0), W(CARPET_WALK, 2.0), W(0.6, 2.5),
            min_scale(P(2.0), P(1.0)), min_scale(P(GASKET_WALK), P(1.5))]


def test_power_values():
    assert eval_scale(P(2), 3.0) == pytest.approx(9.0, rel=1e-15)
    assert eval_scale(P(GASKET_WALK), 2.0) == pytest.approx(5.0, rel=1e-14)
    for spec in builtin_specs():
        assert spec(0.0) == 0.0
        assert spec(1.0) == pytest.approx(1.0, rel=1e-15)


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        eval_scale(P(2), -1.0)
    with pytest.raises(DomainError):
        invert_scale(P(2), -1.0)


def test_inverse_examples():
    assert invert_scale(P(2), 9.0) == pytest.approx(3.0, rel=1e-15)
    assert invert_scale(W(2.5, 2.0), 1.0) == pytest.approx(1.0)
    assert invert_scale(P(2), 0.0) == 0.0


@pytest.mark.parametrize("spec", builtin_specs(), ids=lambda s: f"{s.kind}")
def test_roundtrip_over_twelve_decades(spec):
    r = np.logspace(-6, 6, 100)
    assert np.allclose(spec.inverse(spec(r)), r, rtol=1e-12, atol=0)


@pytest.mark.parametrize("spec", builtin_specs(), ids=lambda s: f"{s.kind}")
def test_closed_inverse_matches_bisection(spec):
    y = np.logspace(-9, 9, 37)
    assert np.allclose(spec.inverse(y), bisect_inverse(spec, y), rtol=1e-11)


@given(exponent, exponent, st.floats(-6, 6))
def test_piecewise_roundtrip_property(a, b, logr):
    spec = W(a, b)
    r = 10.0 ** logr
    assert spec.inverse(spec(r)) == pytest.approx(r, rel=1e-12)


@given(exponent, exponent)
def test_strictly_increasing(a, b):
    for spec in (W(a, b), min_scale(P(a), P(b))):
        v = spec(log_grid(1e-6, 1e6, 8))
        assert np.all(np.diff(v) > 0)


def test_min_scale_examples():
    m = min_scale(P(2), P(1))
    assert m(4.0) == pytest.approx(4.0)
    assert m(0.25) == pytest.approx(0.0625)
    assert m.lu_exponents == (1.0, 2.0)


@given(exponent, exponent, st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_min_scale_is_pointwise_min(a, b, ka, kb):
    x, y = P(a, ka), P(b, kb)
    g = log_grid(1e-4, 1e4, 8)
    assert np.allclose(min_scale(x, y)(g), np.minimum(x(g), y(g)), rtol=1e-13)


def test_scale_order():
    assert check_scale_order(P(2), P(1))
    assert not check_scale_order(P(1), P(2))
    # oracle: dense comparison of the two power laws
    assert check_scale_order(P(GASKET_WALK), P(1.5))
    g = np.logspace(-6, 6, 20001)
    c, j = g ** GASKET_WALK, g ** 1.5
    assert np.all(c[g <= 1] <= j[g <= 1]) and np.all(c[g > 1] >= j[g > 1])


def _lu_oracle(spec, a1, a2, grid):
    # exhaustive loop over grid pairs
    v = spec(grid)
    best = 1.0
    for i in range(len(grid)):
        for k in range(i, len(grid)):
            q, s = v[k] / v[i], grid[k] / grid[i]
            best = max(best, q / s ** a2, s ** a1 / q)
    return best


def test_verify_LU_examples():
    for beta in (0.5, 2.0, GASKET_WALK):
        ok, c = verify_LU(P(beta), beta, beta)
        assert ok and c == pytest.approx(1.0, abs=1e-12)
    ok, c = verify_LU(W(2.5, 2.0), 2.0, 2.5)
    grid = log_grid(1e-3, 1e3, 8)
    assert ok and c == pytest.approx(1.0, abs=1e-12)
    assert verify_LU(W(2.5, 2.0), 2.0, 2.5, grid)[1] == pytest.approx(_lu_oracle(W(2.5, 2.0), 2.0, 2.5, grid))
    assert not verify_LU(P(2), 3, 4)[0]


def test_verify_LU_with_wrong_range_matches_oracle():
    grid = log_grid(1e-2, 1e2, 6)
    spec = min_scale(P(2), P(1))
    assert verify_LU(spec, 1.2, 1.8, grid)[1] == pytest.approx(_lu_oracle(spec, 1.2, 1.8, grid), rel=1e-12)


@pytest.mark.parametrize("spec", builtin_specs(), ids=lambda s: s.kind)
def test_presets_satisfy_declared_LU(spec):
    ok, c = verify_LU(spec, *spec.lu_exponents)
    assert ok and c <= 2.0


def test_volume_profiles():
    assert VolumeProfile(GASKET_D, constant=1.7)(2.0) == pytest.approx(3 * 1.7)
    assert VolumeProfile(1.0)(5.0) == pytest.approx(5.0)
    assert verify_VD(VolumeProfile(2.0)) == (pytest.approx(1.0), 2.0)
    carpet = VolumeProfile(CARPET_D, d_large=2.0)
    c, d2 = verify_VD(carpet)
    assert d2 == 2.0 and c == pytest.approx(1.0)
    with pytest.raises(DomainError):
        VolumeProfile(1.0)(-1.0)


def test_gasket_dimensions():
    d, beta = gasket_dimensions(2)
    assert d == pytest.approx(GASKET_D) and beta == pytest.approx(GASKET_WALK)
    assert 2 ** d == pytest.approx(3.0) and 2 ** beta == pytest.approx(5.0)


def test_serialization_roundtrip():
    for spec in builtin_specs():
        again = ScaleSpec.from_dict(spec.to_dict())
        g = log_grid(1e-3, 1e3, 4)
        assert np.allclose(again(g), spec(g), rtol=1e-15)
    v = VolumeProfile(CARPET_D, 2.0, 2.0)
    assert VolumeProfile.from_dict(v.to_dict()) == v


def test_from_dict_diagnostics():
    with pytest.raises(ConfigError, match="kind"):
        ScaleSpec.from_dict({"exponents": [1]})
    with pytest.raises(ConfigError, match="unknown"):
        ScaleSpec.from_dict({"kind": "power", "exponents": [1], "colour": 1})


def test_invalid_specs():
    with pytest.raises((ConfigError, ValueError)):
        ScaleSpec("power", (-1.0,))
    with pytest.raises((ConfigError, ValueError)):
        ScaleSpec("cubic", (1.0,))


def test_local_exponents_match_slopes():
    spec = W(0.6, 2.5)
    for r, expected in ((1e-5, 0.6), (1e5, 2.5)):
        slope = math.log(spec(r * 1.01) / spec(r)) / math.log(1.01)
        assert slope == pytest.approx(expected, rel=1e-9)
        assert spec.local_exponent(r) == expected
