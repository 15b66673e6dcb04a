import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palsim.params import VehicleParams
from palsim.vehicle import (IP, IR, IROLL, IV, IY, IYAW, IZ, DriverCommand, NumericalDivergence,
                            Plant, VehicleState, compute_lateral_tire_force,
                            compute_tire_vertical_force, input_vector, step_dynamics,
                            tire_vertical_force)


def test_static_tire_force_from_weight_split(params):
    # front corner: (2700*9.81/4 + 62.5*9.81) / 290000 = 0.02495 m; 0.0245 is the rounded figure
    compression = (2700 * 9.81 / 4 + 62.5 * 9.81) / 290000
    assert compression == pytest.approx(0.0245, rel=0.02)
    assert tire_vertical_force(0.0245, 0.0, params) == pytest.approx(7105.0)
    assert tire_vertical_force(compression, 0.0, params) == pytest.approx(params.static_tire_loads[0])


def test_tire_force_clamps_at_lift_off(params):
    assert tire_vertical_force(0.0, 3.0, params) == 0.0
    assert tire_vertical_force(-0.01, -3.0, params) == 0.0


def test_tire_force_with_rate(params):
    assert tire_vertical_force(0.01, -0.5, params) == pytest.approx(2750.0)


def test_tire_force_from_state(params):
    plant = Plant(params)
    state = VehicleState.from_vector(plant.equilibrium())
    for corner in (1, 2, 3, 4):
        f = compute_tire_vertical_force(state, params, corner)
        assert f == pytest.approx(params.static_tire_loads[corner - 1])
    with pytest.raises(ValueError):
        compute_tire_vertical_force(state, params, 0)


def test_lateral_force_examples():
    p = VehicleParams(cornering_stiffness_coeffs=(15.0, 5e-4), friction_coefficient=1.0)
    assert compute_lateral_tire_force(7000.0, 0.05, p) == pytest.approx(-4025.0)
    assert compute_lateral_tire_force(0.0, 0.2, p) == 0.0
    assert compute_lateral_tire_force(5000.0, 0.0, p) == 0.0


def test_lateral_force_saturates_at_friction_limit(params):
    f = compute_lateral_tire_force(4000.0, 0.5, params)
    assert f == pytest.approx(-params.friction_coefficient * 4000.0)


@settings(max_examples=200, deadline=None)
@given(load=st.floats(0, 20000), slip=st.floats(-0.5, 0.5), fx=st.floats(-5000, 5000))
def test_lateral_force_friction_ellipse(load, slip, fx):
    p = VehicleParams()
    fy = compute_lateral_tire_force(load, slip, p, longitudinal_force=fx)
    assert fy ** 2 + min(fx ** 2, (p.friction_coefficient * load) ** 2) <= \
        (p.friction_coefficient * load) ** 2 * (1 + 1e-12) + 1e-9
    assert compute_lateral_tire_force(load, -slip, p, longitudinal_force=fx) == -fy


def test_equilibrium_is_fixed_point(params):
    plant = Plant(params)
    y0 = plant.equilibrium()
    y1 = plant.step(y0, np.zeros(6), 1e-3)
    assert np.max(np.abs(y1 - y0)) < 1e-9


def test_settling_from_heave_offset(params):
    plant = Plant(params)
    y = plant.equilibrium()
    y[IZ] += 0.005
    u = np.zeros(6)
    for _ in range(5000):
        y = plant.step(y, u, 1e-3)
    total = plant.corner_forces(y, u).vertical_tire_force.sum()
    assert total == pytest.approx(params.total_mass * params.gravity, rel=1e-3)


def test_symmetric_torque_raises_chassis(params):
    plant = Plant(params)
    y = plant.equilibrium()
    u = input_vector(DriverCommand(), [100.0] * 4)
    for _ in range(6000):
        y = plant.step(y, u, 1e-3)
    forces = plant.corner_forces(y, u)
    assert y[IZ] > params.cmc_height
    # tire loads are unchanged, so each spring sheds exactly beta * T
    np.testing.assert_allclose(forces.suspension_force, params.static_sprung_loads - 2000.0,
                               atol=2.0)
    np.testing.assert_allclose(forces.actuator_equivalent_force, 2000.0)


def test_energy_non_increasing_at_rest(params):
    plant = Plant(params)
    y = plant.equilibrium()
    y[IZ] += 0.004
    y[IROLL] = 0.02
    y[13] += 0.002
    u = np.zeros(6)
    energy = [plant.energy(y)]
    for _ in range(1500):
        y = plant.step(y, u, 1e-3)
        energy.append(plant.energy(y))
    assert np.all(np.diff(energy) <= 1e-9)
    assert energy[-1] < 0.05 * energy[0]


def _mirror_run(params, steer, torques):
    plant = Plant(params)
    y = plant.equilibrium(20.0)
    u = input_vector(DriverCommand(steer, 300.0), torques)
    trace = []
    for _ in range(1500):
        y = plant.step(y, u, 1e-3)
        trace.append(y.copy())
    return np.array(trace)


def test_left_right_mirror(params):
    p = params.replace(track_rear=params.track_front)
    a = _mirror_run(p, 0.04, [10.0, -10.0, 5.0, -5.0])
    b = _mirror_run(p, -0.04, [-10.0, 10.0, -5.0, 5.0])
    for idx in (IY, IROLL, IYAW, IV, IP, IR):
        np.testing.assert_allclose(a[:, idx], -b[:, idx], atol=1e-9)
    np.testing.assert_allclose(a[:, IZ], b[:, IZ], atol=1e-9)


def test_tire_forces_non_negative_and_within_friction(params):
    plant = Plant(params)
    y = plant.equilibrium(25.0)
    u = input_vector(DriverCommand(0.08, 0.0), np.zeros(4))
    for _ in range(3000):
        y = plant.step(y, u, 1e-3)
        f = plant.corner_forces(y, u)
        assert np.all(f.vertical_tire_force >= 0)
        assert np.all(np.abs(f.lateral_tire_force)
                      <= params.friction_coefficient * f.vertical_tire_force + 1e-9)


def test_step_dynamics_wrapper(params):
    state = VehicleState.from_vector(Plant(params).equilibrium(10.0))
    nxt = step_dynamics(state, np.zeros(4), DriverCommand(), params, 1e-3)
    assert nxt.time == pytest.approx(1e-3)
    assert nxt.is_finite()
    assert nxt.position[0] == pytest.approx(0.01, rel=1e-6)


def test_divergence_is_reported(params):
    plant = Plant(params)
    y = plant.equilibrium()
    y[IZ] = math.nan
    with pytest.raises(NumericalDivergence):
        plant.step(y, np.zeros(6), 1e-3)


def test_rejects_large_step(params):
    with pytest.raises(ValueError):
        Plant(params).step(Plant(params).equilibrium(), np.zeros(6), 0.01)
