import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palsim.metrics import (Telemetry, WindowMismatch, detect_rollover, detect_two_wheel_lift,
                            rms, rms_ratio, rms_ratio_report, run_report, settling_time)


def trace(n=1001, dt=1e-3):
    t = np.arange(n) * dt
    fz = np.full((n, 4), 5000.0)
    return t, fz


def test_no_lift():
    t, fz = trace()
    assert detect_two_wheel_lift(t, fz) == []


def test_lift_fixture_interval():
    t = np.round(np.arange(0, 4.0001, 1e-3), 6)
    fz = np.full((t.size, 4), 5000.0)
    lifted = (t >= 2.23) & (t < 2.29)
    fz[lifted, 0] = 0.0
    fz[lifted, 2] = 0.0
    intervals = detect_two_wheel_lift(t, fz)
    assert len(intervals) == 1
    side, start, end = intervals[0]
    assert side == "left"
    assert start == pytest.approx(2.23)
    assert end == pytest.approx(2.29)


def test_single_wheel_is_not_lift():
    t, fz = trace()
    fz[100:300, 1] = 0.0
    fz[400:500, 2] = 0.0  # rear left only, front left loaded
    assert detect_two_wheel_lift(t, fz) == []


def test_open_interval_closes_at_end():
    t, fz = trace()
    fz[900:, 1] = 0.5
    fz[900:, 3] = 0.0
    assert detect_two_wheel_lift(t, fz) == [("right", pytest.approx(0.9), pytest.approx(1.0))]


def test_rollover_detection():
    t = np.linspace(0, 5, 501)
    assert detect_rollover(t, 0.1 * np.sin(t)) == (False, None)
    roll = 0.7 * t / 3.1
    roll[t >= 3.1] = 0.7000001 + t[t >= 3.1] * 1e-3
    flagged, when = detect_rollover(t, roll)
    assert flagged and when == pytest.approx(3.1)
    assert detect_rollover(t, np.zeros_like(t), diverged=True)[0]


def test_settling_time():
    t = np.linspace(0, 10, 10001)
    x = np.exp(-t)
    # 5 % of the unit excursion: exp(-t) = 0.05
    assert settling_time(t, x) == pytest.approx(np.log(20), abs=2e-3)
    assert settling_time(t, np.zeros_like(t)) == 0.0
    assert settling_time(t, x, tolerance=0.5) == pytest.approx(np.log(2), abs=2e-3)


def telemetry(roll, dt=1e-2):
    tel = Telemetry.allocate(len(roll), {"maneuver": "synthetic", "nested": {"a": [1, 2]}})
    tel.time[:] = np.arange(len(roll)) * dt
    tel.state[:, 3] = roll
    return tel


def test_rms_ratio_examples():
    roll = np.sin(np.linspace(0, 20, 400))
    passive = telemetry(roll)
    assert rms_ratio(telemetry(roll), passive) == 1.0
    assert rms_ratio(telemetry(np.zeros(400)), passive) == 0.0
    with pytest.raises(WindowMismatch):
        rms_ratio(telemetry(roll[:-1]), passive)
    reports = rms_ratio_report({"a": telemetry(0.5 * roll)}, passive)
    assert reports["a"].roll_rms_ratio_vs_passive == pytest.approx(0.5)


def test_report_fields_and_determinism():
    t, fz = trace(n=500, dt=1e-2)
    tel = telemetry(0.2 * np.sin(t))
    tel.tire_fz[:] = fz
    tel.tire_fz[100:120, [0, 2]] = 0.0
    tel.tire_fz[300:310, [1, 3]] = 0.0
    a, b = run_report(tel), run_report(tel)
    assert a == b
    assert a.rms_roll >= 0
    starts = [iv[1] for iv in a.two_wheel_lift_intervals]
    assert starts == sorted(starts)
    for (_, s0, e0), (_, s1, _) in zip(a.two_wheel_lift_intervals, a.two_wheel_lift_intervals[1:]):
        assert e0 <= s1
    assert not a.rolled_over


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
def test_rms_non_negative(values):
    assert rms(values) >= 0


def test_csv_roundtrip_default_precision(tmp_path, rng):
    tel = telemetry(rng.normal(size=50))
    for name in ("tire_fz", "torque", "torque_ff"):
        getattr(tel, name)[:] = rng.normal(size=(50, 4)) * 1000
    tel.ay[:] = rng.normal(size=50)
    path = tmp_path / "run.csv"
    tel.to_csv(path)
    back = Telemetry.from_csv(path)
    # default 9 significant digits
    np.testing.assert_allclose(back.as_table(), tel.as_table(), rtol=1e-8, atol=1e-300)
    assert back.metadata == json.loads(json.dumps(tel.metadata))
    header = path.read_text().splitlines()[1]
    assert header.startswith("time [s],x [m]")
    assert "torque_FL [N m]" in header


def test_csv_roundtrip_bit_exact(tmp_path, rng):
    tel = telemetry(rng.normal(size=50))
    tel.torque[:] = rng.normal(size=(50, 4))
    path = tmp_path / "run.csv"
    tel.to_csv(path, precision=17)
    back = Telemetry.from_csv(path)
    assert np.array_equal(back.as_table(), tel.as_table())
    # values that fit in 9 digits also survive the default exactly
    tel.torque[:] = np.round(tel.torque, 4)
    tel.state[:] = np.round(tel.state, 4)
    tel.time[:] = np.round(tel.time, 4)
    tel.to_csv(path)
    assert np.array_equal(Telemetry.from_csv(path).as_table(), tel.as_table())
