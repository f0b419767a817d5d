"""Wind field tests: divergence-free construction and gradient oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cruiseopt.errors import ValidationError
from cruiseopt.scenario import default_scenario_path, load_scenario
from cruiseopt.wind import ConstantWind, PolynomialWind

SCN = load_scenario(default_scenario_path())
WIND = SCN.wind


def _fd_gradients(field, x, y, h=1e4):
    # central differences are exact (up to roundoff) for a quadratic field
    wxp, wyp = field.wind_at(x + h, y)
    wxm, wym = field.wind_at(x - h, y)
    dwx_dx = (wxp - wxm) / (2 * h)
    dwy_dx = (wyp - wym) / (2 * h)
    wxp, wyp = field.wind_at(x, y + h)
    wxm, wym = field.wind_at(x, y - h)
    dwx_dy = (wxp - wxm) / (2 * h)
    dwy_dy = (wyp - wym) / (2 * h)
    return dwx_dx, dwx_dy, dwy_dx, dwy_dy


def test_shipped_field_is_table_configuration():
    assert isinstance(WIND, PolynomialWind)
    assert WIND.a0 == 0.77406
    assert WIND.wxb == 40.0
    assert WIND.wyb == -20.0


def test_divergence_free_at_1000_random_points():
    rng = np.random.default_rng(7)
    xs = rng.uniform(-0.5 * SCN.xf, 1.5 * SCN.xf, 1000)
    ys = rng.uniform(-0.5 * SCN.yf, 1.5 * SCN.yf, 1000)
    worst = 0.0
    for x, y in zip(xs, ys):
        grads = _fd_gradients(WIND, x, y)
        scale = max(abs(g) for g in grads)
        worst = max(worst, abs(grads[0] + grads[3]) / scale)
    assert worst < 1e-12


def test_analytic_gradients_match_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = rng.uniform(0.0, SCN.xf)
        y = rng.uniform(0.0, SCN.yf)
        ana = WIND.wind_gradients(x, y)
        fd = _fd_gradients(WIND, x, y)
        for a, f in zip(ana, fd):
            assert a == pytest.approx(f, rel=1e-6, abs=1e-12)


def test_corner_value_oracle():
    # at (x_f, y_f) both normalized coordinates are 1: wx = wxb * sum(a)
    wx, wy = WIND.wind_at(WIND.x_f, WIND.y_f)
    expected_wx = WIND.wxb * (WIND.a0 + WIND.a1 + WIND.a2 + WIND.a3
                              + WIND.a4 + WIND.a5)
    expected_wy = (-WIND.wxb * (WIND.a1 + 2.0 * WIND.a2 + 0.5 * WIND.a5)
                   * WIND.y_f / WIND.x_f
                   + WIND.wyb * (1.0 + WIND.b0 + WIND.b1))
    assert wx == pytest.approx(expected_wx, rel=1e-14)
    assert wy == pytest.approx(expected_wy, rel=1e-14)


def test_constant_wind_uniform():
    cw = ConstantWind(40.0, -20.0)
    assert cw.wind_at(0.0, 0.0) == (40.0, -20.0)
    assert cw.wind_at(1e6, -3e5) == (40.0, -20.0)
    assert cw.wind_gradients(5.0, 5.0) == (0.0, 0.0, 0.0, 0.0)


def test_zero_scale_rejected():
    with pytest.raises(ValidationError):
        PolynomialWind(a0=0.1, a1=0.1, a2=0.1, a3=0.1, a4=0.1, a5=0.1,
                       b0=0.1, b1=0.1, wxb=40.0, wyb=-20.0, x_f=0.0, y_f=7e5)


def test_oversized_coefficient_warns():
    with pytest.warns(UserWarning, match="outside"):
        PolynomialWind(a0=1.5, a1=0.0, a2=0.0, a3=0.0, a4=0.0, a5=0.0,
                       b0=0.0, b1=0.0, wxb=40.0, wyb=-20.0,
                       x_f=1.5e6, y_f=7e5)


@given(st.floats(min_value=-2e6, max_value=2e6),
       st.floats(min_value=-2e6, max_value=2e6))
@settings(max_examples=60)
def test_divergence_free_property(x, y):
    grads = _fd_gradients(WIND, x, y)
    scale = max(abs(g) for g in grads)
    assert abs(grads[0] + grads[3]) / scale < 1e-10
