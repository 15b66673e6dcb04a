"""Passive, multi-objective PID and feedforward-PID suspension controllers.

All controllers map attitude and acceleration measurements to reference
rocker torques.  The inner-loop motor current control is replaced by
:func:`actuator_track`, a saturated first-order torque lag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compensation import CompensationCoefficients, force_to_torque, poly_fit_increment
from .params import FF_PID_NON_GAINS, PALS_PID_GAINS, PidGains, VehicleParams

DERIVATIVE_TIME_CONSTANT = 0.01  # s
ACCEL_FILTER_HZ = 5.0

PITCH_PATTERN = np.array([-1.0, -1.0, 1.0, 1.0])
ROLL_PATTERN = np.array([-1.0, 1.0, -1.0, 1.0])

CONTROLLER_NAMES = ("passive", "pals-pid", "ff-pid-non")


@dataclass
class Measurement:
    """What the suspension controller sees at one sample."""

    pitch: float = 0.0
    roll: float = 0.0
    ax: float = 0.0
    ay: float = 0.0


@dataclass
class ControllerState:
    """Integrators, derivative filters and torques of one run.

    Integrals are kept per axle, index 0 front and 1 rear, so each axle's
    anti-windup clamp can follow its own integral gain.
    """

    pitch_integral: tuple[float, float] = (0.0, 0.0)
    roll_integral: tuple[float, float] = (0.0, 0.0)
    previous_pitch: float | None = None
    previous_roll: float | None = None
    pitch_rate: float = 0.0
    roll_rate: float = 0.0
    commanded_torques: np.ndarray = field(default_factory=lambda: np.zeros(4))
    actual_torques: np.ndarray = field(default_factory=lambda: np.zeros(4))


def _filtered_derivative(value, previous, filtered, dt, tau=DERIVATIVE_TIME_CONSTANT):
    if previous is None:
        return 0.0
    return (tau * filtered + (value - previous)) / (tau + dt)


def _clamp(value, ki, limit):
    """Anti-windup: keep ``|ki * value| <= limit``."""
    if ki > 0:
        bound = limit / ki
        return min(max(value, -bound), bound)
    return value


def pid_reference_torques(pitch: float, roll: float, state: ControllerState,
                          gains: PidGains, dt: float,
                          torque_limit=(273.0, 273.0)) -> np.ndarray:
    """Multi-objective PID law; updates ``state`` in place.

    Pitch objective: front corners get ``-u_pitch``, rear corners ``+u_pitch``.
    Roll objective: left corners get ``-u_roll``, right corners ``+u_roll``.
    The per-corner reference is the sum of both objectives.  Integrals use
    the rectangular rule and are clamped so that ``Ki * integral`` never
    exceeds the axle torque limit.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    pitch = float(pitch)
    roll = float(roll)
    lim_f, lim_r = float(torque_limit[0]), float(torque_limit[1])
    state.pitch_rate = _filtered_derivative(pitch, state.previous_pitch, state.pitch_rate, dt)
    state.roll_rate = _filtered_derivative(roll, state.previous_roll, state.roll_rate, dt)
    state.previous_pitch = pitch
    state.previous_roll = roll

    pf, pr = gains.pitch_front, gains.pitch_rear
    rf, rr = gains.roll_front, gains.roll_rear
    pi, ri = state.pitch_integral, state.roll_integral
    pi_f = _clamp(pi[0] + pitch * dt, pf[1], lim_f)
    pi_r = _clamp(pi[1] + pitch * dt, pr[1], lim_r)
    ri_f = _clamp(ri[0] + roll * dt, rf[1], lim_f)
    ri_r = _clamp(ri[1] + roll * dt, rr[1], lim_r)
    state.pitch_integral = (pi_f, pi_r)
    state.roll_integral = (ri_f, ri_r)

    up_f = pf[0] * pitch + pf[1] * pi_f + pf[2] * state.pitch_rate
    up_r = pr[0] * pitch + pr[1] * pi_r + pr[2] * state.pitch_rate
    ur_f = rf[0] * roll + rf[1] * ri_f + rf[2] * state.roll_rate
    ur_r = rr[0] * roll + rr[1] * ri_r + rr[2] * state.roll_rate
    torques = np.array([-up_f - ur_f, -up_f + ur_f, up_r - ur_r, up_r + ur_r])
    state.commanded_torques = torques
    return torques


def feedforward_torques(ax: float, ay: float, coeffs: CompensationCoefficients,
                        beta) -> np.ndarray:
    """Torques whose vertical forces carry the predicted load transfer.

    A corner expected to gain load gets a positive torque, lifting the
    chassis there by exactly the predicted increment.
    """
    return force_to_torque(poly_fit_increment(ax, ay, coeffs).per_corner, beta)


def compose_ff_pid(ff_torques, pid_torques) -> np.ndarray:
    """Summing junction; saturation happens in the actuator."""
    return np.asarray(ff_torques, dtype=float) + np.asarray(pid_torques, dtype=float)


def actuator_track(reference, actual, dt: float, params: VehicleParams) -> np.ndarray:
    """One step of the saturated first-order torque lag."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = params.peak_torques
    target = np.clip(np.asarray(reference, dtype=float), -limit, limit)
    alpha = min(dt / params.actuator_time_constant, 1.0)
    return actual + (target - actual) * alpha


class Controller:
    """Base class: subclasses fill ``update``.

    ``last_ff`` and ``last_pid`` expose the two branches of the most recent
    reference so telemetry can attribute the command.
    """

    name = "base"

    def __init__(self, params: VehicleParams):
        self.params = params
        self.state = ControllerState()
        self.last_ff = np.zeros(4)
        self.last_pid = np.zeros(4)

    def reset(self) -> None:
        self.state = ControllerState()
        self.last_ff = np.zeros(4)
        self.last_pid = np.zeros(4)

    def update(self, meas: Measurement, dt: float) -> np.ndarray:
        raise NotImplementedError

    def metadata(self) -> dict:
        return {"controller": self.name}


class PassiveController(Controller):
    name = "passive"

    def update(self, meas, dt):
        self.state.commanded_torques = np.zeros(4)
        return self.state.commanded_torques


class PidController(Controller):
    name = "pals-pid"

    def __init__(self, params: VehicleParams, gains: PidGains = PALS_PID_GAINS):
        super().__init__(params)
        self.gains = gains

    def _pid(self, meas, dt):
        limit = (self.params.peak_torque_front, self.params.peak_torque_rear)
        return pid_reference_torques(meas.pitch, meas.roll, self.state, self.gains, dt, limit)

    def update(self, meas, dt):
        self.last_pid = self._pid(meas, dt)
        return self.last_pid

    def metadata(self):
        return {"controller": self.name, "gains": self.gains.to_dict()}


class FeedforwardPidController(PidController):
    """Polynomial-fit feedforward plus retuned PID feedback.

    The accelerations are low-passed at 5 Hz before the compensation model
    is evaluated.
    """

    name = "ff-pid-non"

    def __init__(self, params: VehicleParams, coeffs: CompensationCoefficients,
                 gains: PidGains = FF_PID_NON_GAINS, filter_hz: float = ACCEL_FILTER_HZ):
        super().__init__(params, gains)
        self.coeffs = coeffs
        self.filter_tau = 1.0 / (2 * np.pi * filter_hz)
        self.ax_filtered = None
        self.ay_filtered = None

    def reset(self):
        super().reset()
        self.ax_filtered = None
        self.ay_filtered = None

    def _filter(self, previous, value, dt):
        if previous is None:
            return value
        return previous + (value - previous) * dt / (self.filter_tau + dt)

    def update(self, meas, dt):
        self.ax_filtered = self._filter(self.ax_filtered, meas.ax, dt)
        self.ay_filtered = self._filter(self.ay_filtered, meas.ay, dt)
        self.last_ff = feedforward_torques(self.ax_filtered, self.ay_filtered, self.coeffs,
                                           self.params.beta_map)
        self.last_pid = self._pid(meas, dt)
        total = compose_ff_pid(self.last_ff, self.last_pid)
        self.state.commanded_torques = total
        return total

    def metadata(self):
        meta = super().metadata()
        meta["coefficients"] = {"lateral_poly": self.coeffs.lateral_poly.tolist(),
                                "longitudinal_slope": self.coeffs.longitudinal_slope.tolist()}
        return meta


def make_controller(name: str, params: VehicleParams, gains: dict[str, PidGains] | None = None,
                    coeffs: CompensationCoefficients | None = None) -> Controller:
    """Build a controller by its CLI name."""
    gains = gains or {}
    if name == "passive":
        return PassiveController(params)
    if name == "pals-pid":
        return PidController(params, gains.get("pals-pid", PALS_PID_GAINS))
    if name == "ff-pid-non":
        if coeffs is None:
            from .fitting import default_coefficients
            coeffs = default_coefficients()
        return FeedforwardPidController(params, coeffs, gains.get("ff-pid-non", FF_PID_NON_GAINS))
    raise ValueError(f"unknown controller {name!r}; choose from {CONTROLLER_NAMES}")
