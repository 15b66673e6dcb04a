import math

import numpy as np
import pytest

from palsim.controllers import PassiveController
from palsim.maneuvers import (ACCEL_COMMAND, FISHHOOK_MES, KMH, MANEUVERS, SINUSOID_FREQUENCIES,
                              BrakeInTurn, DriverInput, Fishhook, FishhookInitial,
                              LongitudinalAccelBrake, Observation, SinusoidSteer,
                              SteadyCornering, Stage1NotConverged, StepSteer, accel_brake_ax,
                              sinusoid_wheel, steady_cornering_wheel, step_steer_wheel,
                              wheel_to_road)
from palsim.simulation import fishhook_delta_ini, run_fishhook, simulate


def test_step_steer_profile():
    assert step_steer_wheel(0.0) == 0.0
    assert step_steer_wheel(0.05) == pytest.approx(25.0)
    assert StepSteer().driver_input(0.05).steer_angle == pytest.approx(math.radians(25 / 16))
    for t in (0.0972, 0.1, 2.0, 4.0):
        assert step_steer_wheel(t) == pytest.approx(48.6)


def test_steady_cornering_profile():
    assert steady_cornering_wheel(0.0) == 0.0
    assert steady_cornering_wheel(200.0, scale=1.0) == pytest.approx(30.0)
    assert steady_cornering_wheel(40.0, scale=0.1) == pytest.approx(60.0)
    assert SteadyCornering(scale=1.0).duration == 400.0
    with pytest.raises(ValueError):
        SteadyCornering(scale=0.0)
    delayed = SteadyCornering(onset=2.0)
    assert delayed.wheel_angle(2.0) == 0.0
    assert delayed.duration == pytest.approx(42.0)


def test_accel_brake_profile():
    m = LongitudinalAccelBrake()
    assert m.accel == pytest.approx(99 / 3.6 / 6.5)
    assert m.accel == pytest.approx(4.23, abs=0.005)
    assert m.commanded_ax(3.0) == pytest.approx(m.accel)
    assert m.commanded_ax(7.0) == 0.0
    assert m.commanded_ax(8.4) == 0.0
    assert m.commanded_ax(8.6) == pytest.approx(-1.15 * 9.81 / 2)
    assert m.commanded_ax(9.0) == pytest.approx(-1.15 * 9.81)
    assert accel_brake_ax(7.5, 4.0) == 0.0


def test_sinusoid_profile():
    assert sinusoid_wheel(0.0, 0.2, 30.0) == 0.0
    assert sinusoid_wheel(1.25, 0.2, 30.0) == pytest.approx(30.0)
    for f in SINUSOID_FREQUENCIES:
        assert SinusoidSteer(frequency=f).duration == pytest.approx(10 / f)
    with pytest.raises(ValueError):
        SinusoidSteer(periods=9)


def test_steer_profiles_continuous():
    fish = Fishhook(delta_ini_deg=20.0)
    obs = Observation(roll_rate=0.2)
    for name, f in {
        "step": lambda t: step_steer_wheel(t),
        "cornering": lambda t: steady_cornering_wheel(t),
        "sine": lambda t: sinusoid_wheel(t, 1.0, 30.0),
        "fishhook": lambda t: fish.wheel_angle(t, 0.2 if t < 1.5 else 0.0),
    }.items():
        t = np.arange(0, 12, 1e-3)
        angles = np.array([f(x) for x in t])
        # no jump larger than the 720 deg/s fishhook rate over one step
        assert np.max(np.abs(np.diff(angles))) <= 0.72 + 1e-9, name


def test_fishhook_timeline():
    m = Fishhook(mes_mph=40.0, delta_ini_deg=20.0)
    assert m.initial_speed == pytest.approx(40 * 0.44704)
    assert m.amplitude_deg == pytest.approx(130.0)
    # first steer goes left (negative wheel angle)
    assert m.wheel_angle(0.6, 0.5) < 0
    t_plateau = m.onset + m.ramp_time
    # roll rate still above the trigger: no reversal yet
    m.wheel_angle(t_plateau + 0.01, math.radians(5.0))
    assert m.reversal_time is None
    m.wheel_angle(t_plateau + 0.2, math.radians(1.0))
    tr = m.reversal_time
    assert tr == pytest.approx(t_plateau + 0.2)
    assert m.wheel_angle(tr + 2 * m.ramp_time + 1.0) == pytest.approx(130.0)
    end = tr + 2 * m.ramp_time + m.dwell + m.return_time
    assert m.wheel_angle(end + 0.1) == 0.0
    m.reset()
    assert m.reversal_time is None


def test_fishhook_coasts():
    m = Fishhook(delta_ini_deg=20.0)
    drv = m.driver_input(1.0, Observation(vx=15.0))
    assert drv.mode == ACCEL_COMMAND and drv.commanded_ax == 0.0


def test_stage1_not_converged(params):
    with pytest.raises(Stage1NotConverged):
        fishhook_delta_ini(params, FishhookInitial(max_deg=10.0))


def test_delta_ini_independent_of_mes(params):
    d = fishhook_delta_ini(params)
    assert 5.0 < d < 100.0
    a = run_fishhook(params, PassiveController(params), 35.0, decimation=50)
    b = run_fishhook(params, PassiveController(params), 50.0, decimation=50)
    assert a.metadata["delta_ini_deg"] == b.metadata["delta_ini_deg"] == pytest.approx(d)


def test_fishhook_deterministic(params):
    runs = [run_fishhook(params, PassiveController(params), 35.0, 25.0, decimation=20)
            for _ in range(2)]
    assert runs[0].metadata["reversal_time"] == runs[1].metadata["reversal_time"]
    assert np.array_equal(runs[0].roll, runs[1].roll)
    assert set(FISHHOOK_MES) == {35.0, 40.0, 45.0, 50.0}


def test_brake_in_turn_phases(params):
    m = BrakeInTurn(wheelbase=params.wheelbase)
    assert m.initial_speed == pytest.approx(22.22, abs=0.01)
    assert m.stop_time == pytest.approx(m.initial_speed / 5.0)
    assert m.initial_speed / m.decel == pytest.approx(4.44, abs=0.01)
    tel = simulate(m, PassiveController(params), params, decimation=10)
    before = tel.window(4.0, m.brake_time - 0.01)
    assert np.mean(tel.ay[before]) == pytest.approx((80 * KMH) ** 2 / 100.0, rel=0.05)
    after = tel.time >= m.brake_time
    assert np.ptp(tel.steer[after]) == 0.0
    stopped = np.nonzero(tel.vx < 0.5)[0]
    t_stop = tel.time[stopped[0]] - m.brake_time
    assert t_stop == pytest.approx(4.44, abs=0.3)


def test_speed_hold_within_1kmh(params):
    for m in (StepSteer(), SinusoidSteer(frequency=0.6)):
        tel = simulate(m, PassiveController(params), params, decimation=10)
        settled = tel.time >= 2.0
        assert np.max(np.abs(tel.vx[settled] - m.initial_speed)) <= 1 * KMH


def test_driver_input_clips_steer():
    assert DriverInput(5.0).steer_angle == pytest.approx(0.6)
    assert wheel_to_road(16.0 * 57.29577951308232) == pytest.approx(1.0)


def test_registry():
    assert set(MANEUVERS) == {"step-steer", "steady-cornering", "brake-in-turn", "accel-brake",
                              "fishhook", "sinusoid"}
