"""Calibration sweeps on the passive plant and the least-squares fit.

Two sweeps keep the acceleration channels separate: a slow steady-cornering
ramp (``ay`` only) and a set of straight-line constant-acceleration runs
(``ax`` only).  Each corner gets a zero-intercept cubic in ``ay`` and a
zero-intercept line in ``ax``, solved by SVD-based least squares
(``numpy.linalg.lstsq``), which is deterministic for identical samples.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .compensation import CompensationCoefficients
from .controllers import PassiveController
from .maneuvers import ACCEL_COMMAND, KMH, DriverInput, Maneuver, SteadyCornering
from .params import VehicleParams
from .simulation import DT, rolled_over, simulate

log = logging.getLogger(__name__)

SAMPLE_HZ = 10.0
TRANSIENT = 2.0          # s excluded at the start of every run
LATERAL_AX_GATE = 0.3    # m/s^2
LONGITUDINAL_AY_GATE = 0.1
MAX_CONDITION = 1e8
MIN_SAMPLES = 30

DECELERATIONS = (0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0)
ACCELERATIONS = (1.0, 2.0, 3.0, 4.0)


class CalibrationAborted(RuntimeError):
    """A calibration run rolled over or diverged."""


class IllConditioned(np.linalg.LinAlgError):
    """The design matrix is too close to singular for a trustworthy fit."""


@dataclass
class CalibrationSample:
    ax: float
    ay: float
    delta_ftz: np.ndarray  # measured minus nominal static load, per corner [N]


def _samples(tel, nominal, start, end, gate_name, gate):
    step = int(round(1.0 / (SAMPLE_HZ * (tel.time[1] - tel.time[0]))))
    idx = np.nonzero(tel.window(start, end))[0][::step]
    out = []
    dropped = 0
    for i in idx:
        if abs(getattr(tel, gate_name)[i]) > gate:
            dropped += 1
            continue
        out.append(CalibrationSample(float(tel.ax[i]), float(tel.ay[i]), tel.tire_fz[i] - nominal))
    if dropped:
        log.info("dropped %d samples outside the |%s| <= %g gate", dropped, gate_name, gate)
    return out


def collect_lateral_sweep(params: VehicleParams, scale: float = 0.1,
                          dt: float = DT) -> list[CalibrationSample]:
    """Slow steer ramp at 100 km/h, sampled at 10 Hz after the transient.

    The ramp starts once the transient window has passed, so the first
    retained sample is straight running.
    """
    maneuver = SteadyCornering(scale=scale, onset=TRANSIENT)
    tel = simulate(maneuver, PassiveController(params), params, dt=dt)
    if rolled_over(tel) or tel.metadata.get("terminated_at") is not None:
        raise CalibrationAborted("lateral sweep did not complete")
    return _samples(tel, params.static_tire_loads, TRANSIENT, np.inf, "ax", LATERAL_AX_GATE)


@dataclass
class _ConstantAccel(Maneuver):
    name = "constant-accel"
    accel: float = -5.0
    speed_kmh: float = 100.0
    run_time: float = 4.0

    @property
    def initial_speed(self):
        return self.speed_kmh * KMH

    @property
    def duration(self):
        if self.accel < 0:
            # stop before standstill so every sample is at steady deceleration
            return min(self.run_time, 0.8 * self.initial_speed / -self.accel)
        return self.run_time

    def driver_input(self, t, obs=None):
        return DriverInput(0.0, commanded_ax=self.accel, mode=ACCEL_COMMAND)


def collect_longitudinal_sweep(params: VehicleParams, accelerations=DECELERATIONS + ACCELERATIONS,
                               dt: float = DT) -> list[CalibrationSample]:
    """Straight constant-acceleration runs from 100 km/h.

    Samples come from the middle of each run, after the pitch transient.
    """
    samples = []
    for accel in accelerations:
        maneuver = _ConstantAccel(accel=accel)
        tel = simulate(maneuver, PassiveController(params), params, dt=dt)
        if rolled_over(tel) or tel.metadata.get("terminated_at") is not None:
            raise CalibrationAborted(f"longitudinal run at {accel} m/s^2 did not complete")
        start = min(1.5, 0.5 * maneuver.duration)
        samples += _samples(tel, params.static_tire_loads, start, maneuver.duration,
                            "ay", LONGITUDINAL_AY_GATE)
    return samples


def _lstsq(design: np.ndarray, target: np.ndarray):
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditioned(f"design matrix condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return coef, np.sqrt(np.mean(resid ** 2, axis=0))


def fit_coefficients(lateral: list[CalibrationSample],
                     longitudinal: list[CalibrationSample]) -> CompensationCoefficients:
    """Per-corner zero-intercept fits: cubic in ay, linear in ax.

    The slope is fitted first; the lateral samples then have their small
    residual ``slope * ax`` share removed before the cubic fit, so that
    the drag-induced pitch transfer of the cornering sweep does not leak
    into the lateral polynomial.
    """
    if len(lateral) < MIN_SAMPLES or len(longitudinal) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples per channel")
    ax = np.array([s.ax for s in longitudinal])
    d_lon = np.array([s.delta_ftz for s in longitudinal])
    slope, lon_rms = _lstsq(ax[:, None], d_lon)

    ay = np.array([s.ay for s in lateral])
    ax_lat = np.array([s.ax for s in lateral])
    d_lat = np.array([s.delta_ftz for s in lateral]) - np.outer(ax_lat, slope[0])

    # scale the columns so the condition number reflects the data, not units
    ay_scale = max(np.max(np.abs(ay)), 1e-12)
    design = np.column_stack([(ay / ay_scale) ** k for k in (1, 2, 3)])
    coef, lat_rms = _lstsq(design, d_lat)
    lat_poly = (coef / ay_scale ** np.arange(1, 4)[:, None]).T
    return CompensationCoefficients(lat_poly, slope[0], lat_rms, lon_rms)


def calibrate(params: VehicleParams, scale: float = 0.1, dt: float = DT):
    """Run both sweeps and fit; returns (coefficients, lateral, longitudinal)."""
    lateral = collect_lateral_sweep(params, scale=scale, dt=dt)
    longitudinal = collect_longitudinal_sweep(params, dt=dt)
    return fit_coefficients(lateral, longitudinal), lateral, longitudinal


def samples_table(samples: list[CalibrationSample]) -> np.ndarray:
    """Rows of (ax, ay, dFz1..dFz4)."""
    return np.array([[s.ax, s.ay, *s.delta_ftz] for s in samples])


@lru_cache(maxsize=1)
def _shipped():
    path = resources.files("palsim") / "data" / "coefficients.txt"
    return CompensationCoefficients.load(path)


def default_coefficients() -> CompensationCoefficients:
    """Coefficients fitted on the default vehicle, shipped with the package."""
    c = _shipped()
    return CompensationCoefficients(c.lateral_poly.copy(), c.longitudinal_slope.copy(),
                                    c.lateral_rms.copy(), c.longitudinal_rms.copy())
