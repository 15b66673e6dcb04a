import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palsim.compensation import (AX_PATTERN, AY_PATTERN, CompensationCoefficients,
                                 aero_increment, force_to_torque, poly_fit_increment,
                                 steady_state_ax_increment, steady_state_ay_increment,
                                 steady_state_increment, torque_to_force)
from palsim.params import ConfigError, VehicleParams

accel = st.floats(-15, 15, allow_nan=False)


def test_ax_oracle(params):
    start = time.perf_counter()
    value = steady_state_ax_increment(1.0, params)
    assert time.perf_counter() - start < 1e-3
    # (2700*0.71 + 2*(62.5*0.385 + 62.5*0.385)) / (2*3.076)
    assert value == pytest.approx(2013.25 / 6.152, rel=1e-9)
    assert value == pytest.approx(327.25, abs=0.005)
    assert steady_state_ax_increment(0.0, params) == 0.0
    assert steady_state_ax_increment(-5.0, params) == pytest.approx(-5 * 2013.25 / 6.152, rel=1e-9)


def test_ay_oracle(params):
    front, rear = steady_state_ay_increment(1.0, params)
    assert front == pytest.approx(0.57 * 2013.25 / 1.677, rel=1e-9)
    assert rear == pytest.approx(0.43 * 2013.25 / 1.696, rel=1e-9)
    # the quoted two-decimal figures 684.27 / 510.46 carry a rounding slip of about 0.02 N
    assert front == pytest.approx(684.27, abs=0.05)
    assert rear == pytest.approx(510.46, abs=0.05)
    f8, r8 = steady_state_ay_increment(8.0, params)
    assert f8 == pytest.approx(8 * front, rel=1e-12)
    assert r8 == pytest.approx(8 * rear, rel=1e-12)
    assert f8 == pytest.approx(5474.2, abs=0.5)
    assert r8 == pytest.approx(4083.7, abs=0.5)
    assert steady_state_ay_increment(0.0, params) == (0.0, 0.0)


def test_aero_oracle(params):
    assert aero_increment(0.0, params) == (0.0, 0.0)
    assert aero_increment(30.0, params) == (0.0, 0.0)
    p = params.replace(aero_coeff_front=0.4)
    front, rear = aero_increment(27.78, p)
    assert front == pytest.approx(0.5 * 0.4 * 27.78 ** 2)
    assert front == pytest.approx(154.3, abs=0.05)
    assert rear == 0.0


@settings(max_examples=1000, deadline=None)
@given(ax=accel, ay=accel)
def test_sign_structure_exact(ax, ay):
    inc = steady_state_increment(ax, ay, 0.0, VehicleParams())
    x, y = inc.ax_part, inc.ay_part
    assert x[0] == x[1] == -x[2] == -x[3]
    assert y[0] == -y[1] and y[2] == -y[3]


@settings(max_examples=200, deadline=None)
@given(ax=accel, ay=accel)
def test_odd_and_linear(ax, ay):
    p = VehicleParams()
    a = steady_state_increment(ax, ay, 0.0, p).per_corner
    b = steady_state_increment(-ax, -ay, 0.0, p).per_corner
    np.testing.assert_allclose(a, -b, atol=1e-9)
    double = steady_state_increment(2 * ax, 0.0, 0.0, p).ax_part
    np.testing.assert_allclose(double, 2 * steady_state_increment(ax, 0.0, 0.0, p).ax_part,
                               rtol=1e-12, atol=1e-9)
    double = steady_state_increment(0.0, 2 * ay, 0.0, p).ay_part
    np.testing.assert_allclose(double, 2 * steady_state_increment(0.0, ay, 0.0, p).ay_part,
                               rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(ax=accel, ay=accel)
def test_poly_even_odd_split(ax, ay):
    lat = np.array([[100, 3, 0.5], [-100, 3, -0.5], [80, 2, 0.2], [-80, 2, -0.2]])
    coeffs = CompensationCoefficients(lat, [-300, -300, 300, 300])
    plus = poly_fit_increment(ax, ay, coeffs)
    minus = poly_fit_increment(-ax, -ay, coeffs)
    # only the quadratic term survives the sum
    np.testing.assert_allclose(plus.per_corner + minus.per_corner, 2 * lat[:, 1] * ay ** 2,
                               rtol=1e-9, atol=1e-6)
    odd = CompensationCoefficients(lat * [1, 0, 1], [-300, -300, 300, 300])
    np.testing.assert_allclose(poly_fit_increment(ax, ay, odd).per_corner,
                               -poly_fit_increment(-ax, -ay, odd).per_corner, atol=1e-9)


def test_linear_poly_reduces_to_steady_state():
    coeffs = CompensationCoefficients(np.tile([684.0, 0, 0], (4, 1)), np.full(4, 327.0))
    assert poly_fit_increment(1.0, 1.0, coeffs).per_corner[0] == pytest.approx(1011.0)
    assert np.all(poly_fit_increment(0.0, 0.0, coeffs).per_corner == 0.0)


def test_from_steady_state_matches_closed_form(params):
    coeffs = CompensationCoefficients.from_steady_state(params)
    for ax, ay in [(1.0, 0.0), (0.0, 1.0), (-3.0, 2.5)]:
        np.testing.assert_allclose(poly_fit_increment(ax, ay, coeffs).per_corner,
                                   steady_state_increment(ax, ay, 0.0, params).per_corner)
    lat, lon = coeffs.antisymmetry_error()
    assert np.all(lat[:, [0, 2]] == 0)
    assert np.all(lon == 0)


def test_force_torque_examples():
    assert force_to_torque(0.0, 20.0) == 0.0
    assert force_to_torque(5460.0, 20.0) == 273.0
    with pytest.raises(ConfigError):
        force_to_torque(1.0, 0.0)
    with pytest.raises(ConfigError):
        torque_to_force(1.0, [20.0, 0.0, 20.0, 20.0])


@settings(max_examples=500, deadline=None)
@given(x=st.floats(-1e6, 1e6, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-300))
def test_force_torque_roundtrip(x):
    # exact for power-of-two beta; within one ulp otherwise
    assert torque_to_force(force_to_torque(x, 16.0), 16.0) == x
    back = torque_to_force(force_to_torque(x, 20.0), 20.0)
    assert abs(back - x) <= np.spacing(abs(x)) if x else back == 0.0


def test_coefficient_file_roundtrip(tmp_path):
    coeffs = CompensationCoefficients(np.arange(12.0).reshape(4, 3) / 7, [1 / 3, 2, -5, 0.1],
                                      [1, 2, 3, 4], [0.5, 0.5, 0.25, 0.25])
    path = tmp_path / "c.txt"
    coeffs.save(path)
    back = CompensationCoefficients.load(path)
    assert np.array_equal(back.lateral_poly, coeffs.lateral_poly)
    assert np.array_equal(back.longitudinal_slope, coeffs.longitudinal_slope)
    assert np.array_equal(back.lateral_rms, coeffs.lateral_rms)
    path.write_text("1 2 3\n")
    with pytest.raises(ConfigError):
        CompensationCoefficients.load(path)


def test_patterns():
    assert list(AX_PATTERN) == [1, 1, -1, -1]
    assert list(AY_PATTERN) == [1, -1, 1, -1]
