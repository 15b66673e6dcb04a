"""Open-loop driver inputs for the six test maneuvers.

Angles handed to the plant are road-wheel angles (steering-wheel angle
divided by the steering ratio); the profile functions work in
steering-wheel degrees because that is how the procedures are written.
Positive steer turns right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

KMH = 1 / 3.6
MPH = 0.44704
G = 9.81

STEERING_RATIO = 16.0
STEER_STOP = 0.6  # rad, road wheel

SPEED_HOLD = "speed-hold"
ACCEL_COMMAND = "accel-command"


class Stage1NotConverged(RuntimeError):
    """The slow-ramp stage never reached the target lateral acceleration."""


class Observation(NamedTuple):
    """Plant signals a driver may react to."""

    vx: float = 0.0
    yaw_rate: float = 0.0
    roll_rate: float = 0.0
    ax: float = 0.0
    ay: float = 0.0


@dataclass
class DriverInput:
    steer_angle: float = 0.0          # road wheel [rad]
    commanded_ax: float = 0.0         # [m/s^2], used in accel-command mode
    mode: str = SPEED_HOLD
    target_speed: float = 0.0         # [m/s], used in speed-hold mode

    def __post_init__(self):
        self.steer_angle = float(np.clip(self.steer_angle, -STEER_STOP, STEER_STOP))


def wheel_to_road(wheel_deg: float, ratio: float = STEERING_RATIO) -> float:
    return math.radians(wheel_deg) / ratio


def ramp(t: float, rate: float, final: float, start: float = 0.0) -> float:
    """Linear ramp from 0 at ``start`` with slope ``rate``, saturating at ``final``."""
    if t <= start:
        return 0.0
    value = rate * (t - start)
    return min(value, final) if final >= 0 else max(-value, final)


# --- pure profile functions (steering-wheel degrees) ------------------------


def step_steer_wheel(t: float, final_deg: float = 48.6, rate_deg_s: float = 500.0,
                     onset: float = 0.0) -> float:
    return ramp(t, rate_deg_s, final_deg, onset)


def steady_cornering_wheel(t: float, scale: float = 0.1, final_deg: float = 60.0,
                           full_duration: float = 400.0) -> float:
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    duration = full_duration * scale
    return final_deg * min(max(t, 0.0), duration) / duration


def sinusoid_wheel(t: float, frequency: float, amplitude_deg: float) -> float:
    return amplitude_deg * math.sin(2 * math.pi * frequency * t)


def accel_brake_ax(t: float, accel: float, accel_time: float = 6.5, hold_time: float = 2.0,
                   stop_decel: float = 1.15 * G, rise_time: float = 0.0) -> float:
    """Acceleration, hold, then an emergency stop whose brake builds up over ``rise_time``."""
    if t < accel_time:
        return accel
    stop = accel_time + hold_time
    if t < stop:
        return 0.0
    if rise_time > 0 and t < stop + rise_time:
        return -stop_decel * (t - stop) / rise_time
    return -stop_decel


# --- maneuvers ---------------------------------------------------------------


@dataclass
class Maneuver:
    """Base: initial speed, run length and a driver law ``driver_input``."""

    name = "maneuver"
    steering_ratio: float = STEERING_RATIO

    @property
    def initial_speed(self) -> float:
        raise NotImplementedError

    @property
    def duration(self) -> float:
        raise NotImplementedError

    def driver_input(self, t: float, obs: Observation) -> DriverInput:
        raise NotImplementedError

    def reset(self) -> None:
        """Clear trigger state before a new run."""

    def metadata(self) -> dict:
        meta = {k: v for k, v in vars(self).items() if not k.startswith("_")}
        meta["maneuver"] = self.name
        meta["initial_speed"] = self.initial_speed
        meta["duration"] = self.duration
        return meta


@dataclass
class StepSteer(Maneuver):
    name = "step-steer"
    speed_kmh: float = 100.0
    final_deg: float = 48.6
    rate_deg_s: float = 500.0
    onset: float = 0.0
    run_time: float = 4.0

    @property
    def initial_speed(self):
        return self.speed_kmh * KMH

    @property
    def duration(self):
        return self.run_time

    def wheel_angle(self, t):
        return step_steer_wheel(t, self.final_deg, self.rate_deg_s, self.onset)

    def driver_input(self, t, obs=None):
        return DriverInput(wheel_to_road(self.wheel_angle(t), self.steering_ratio),
                           mode=SPEED_HOLD, target_speed=self.initial_speed)


@dataclass
class SteadyCornering(Maneuver):
    name = "steady-cornering"
    speed_kmh: float = 100.0
    final_deg: float = 60.0
    scale: float = 0.1
    full_duration: float = 400.0
    onset: float = 0.0  # straight running before the ramp starts

    def __post_init__(self):
        if not 0 < self.scale <= 1:
            raise ValueError("scale must lie in (0, 1]")

    @property
    def initial_speed(self):
        return self.speed_kmh * KMH

    @property
    def duration(self):
        return self.onset + self.full_duration * self.scale

    def wheel_angle(self, t):
        return steady_cornering_wheel(t - self.onset, self.scale, self.final_deg,
                                      self.full_duration)

    def driver_input(self, t, obs=None):
        return DriverInput(wheel_to_road(self.wheel_angle(t), self.steering_ratio),
                           mode=SPEED_HOLD, target_speed=self.initial_speed)


@dataclass
class BrakeInTurn(Maneuver):
    """Hold a circle by yaw-rate feedback, then freeze the wheel and brake.

    The circle is entered from straight running; the yaw-rate target ramps
    up over ``entry_time``.  Braking continues until standstill.
    """

    name = "brake-in-turn"
    speed_kmh: float = 80.0
    radius: float = 100.0
    brake_time: float = 5.0
    decel: float = 5.0
    entry_time: float = 1.0
    settle_time: float = 3.0
    yaw_gain: float = 0.5
    yaw_integral_gain: float = 2.0
    wheelbase: float = 3.076  # m, for the kinematic steer feedforward
    _steer: float = field(default=0.0, repr=False)
    _integral: float = field(default=0.0, repr=False)
    _last_t: float = field(default=0.0, repr=False)

    @property
    def initial_speed(self):
        return self.speed_kmh * KMH

    @property
    def duration(self):
        return self.brake_time + self.initial_speed / self.decel + self.settle_time

    @property
    def stop_time(self) -> float:
        return self.initial_speed / self.decel

    def reset(self):
        self._steer = 0.0
        self._integral = 0.0
        self._last_t = 0.0

    def driver_input(self, t, obs):
        if t < self.brake_time:
            dt = max(t - self._last_t, 0.0)
            self._last_t = t
            target = self.initial_speed / self.radius * min(t / self.entry_time, 1.0)
            error = target - obs.yaw_rate
            self._integral += error * dt
            wheelbase_ff = self.wheelbase * target / max(obs.vx, 1.0)
            self._steer = wheelbase_ff + self.yaw_gain * error + self.yaw_integral_gain * self._integral
            return DriverInput(self._steer, mode=SPEED_HOLD, target_speed=self.initial_speed)
        return DriverInput(self._steer, commanded_ax=-self.decel, mode=ACCEL_COMMAND)


@dataclass
class LongitudinalAccelBrake(Maneuver):
    name = "accel-brake"
    start_kmh: float = 1.0
    end_kmh: float = 100.0
    accel_time: float = 6.5
    hold_time: float = 2.0
    stop_decel_g: float = 1.15
    brake_rise_time: float = 0.2  # s, brake pressure build-up
    settle_time: float = 2.0

    @property
    def initial_speed(self):
        return self.start_kmh * KMH

    @property
    def accel(self) -> float:
        return (self.end_kmh - self.start_kmh) * KMH / self.accel_time

    @property
    def stop_start(self) -> float:
        return self.accel_time + self.hold_time

    @property
    def duration(self):
        stopping = self.end_kmh * KMH / (self.stop_decel_g * G) + 0.5 * self.brake_rise_time
        return self.stop_start + stopping + self.settle_time

    def commanded_ax(self, t):
        return accel_brake_ax(t, self.accel, self.accel_time, self.hold_time,
                              self.stop_decel_g * G, self.brake_rise_time)

    def driver_input(self, t, obs=None):
        return DriverInput(0.0, commanded_ax=self.commanded_ax(t), mode=ACCEL_COMMAND)


@dataclass
class FishhookInitial(Maneuver):
    """Stage 1: slow steer ramp at 50 mph to find the 0.3 g wheel angle."""

    name = "fishhook-stage1"
    speed_mph: float = 50.0
    rate_deg_s: float = 13.5
    max_deg: float = 270.0
    target_g: float = 0.3

    @property
    def initial_speed(self):
        return self.speed_mph * MPH

    @property
    def duration(self):
        return self.max_deg / self.rate_deg_s

    def wheel_angle(self, t):
        return ramp(t, self.rate_deg_s, self.max_deg)

    def driver_input(self, t, obs=None):
        return DriverInput(wheel_to_road(self.wheel_angle(t), self.steering_ratio),
                           mode=SPEED_HOLD, target_speed=self.initial_speed)


@dataclass
class Fishhook(Maneuver):
    """Stage 2: steer to -6.5 delta_ini, reverse on the roll-rate trigger.

    The first steer goes left.  The wheel reverses once it has reached the
    first plateau and the roll rate, having exceeded the threshold, falls
    back below it.  After 3 s at the reversed angle the wheel returns to
    zero over 2 s.
    """

    name = "fishhook"
    mes_mph: float = 35.0
    delta_ini_deg: float = 25.0
    multiplier: float = 6.5
    rate_deg_s: float = 720.0
    onset: float = 0.5
    trigger_deg_s: float = 1.5
    dwell: float = 3.0
    return_time: float = 2.0
    tail: float = 1.0
    max_wait: float = 3.0
    reversal_time: float | None = None
    _peak_rate: float = field(default=0.0, repr=False)

    @property
    def initial_speed(self):
        return self.mes_mph * MPH

    @property
    def amplitude_deg(self) -> float:
        return self.multiplier * self.delta_ini_deg

    @property
    def ramp_time(self) -> float:
        return self.amplitude_deg / self.rate_deg_s

    @property
    def duration(self):
        longest_reversal = self.onset + self.ramp_time + self.max_wait
        return longest_reversal + 2 * self.ramp_time + self.dwell + self.return_time + self.tail

    def reset(self):
        self.reversal_time = None
        self._peak_rate = 0.0

    def wheel_angle(self, t, roll_rate: float = 0.0) -> float:
        amp = self.amplitude_deg
        first = -ramp(t, self.rate_deg_s, amp, self.onset)
        if self.reversal_time is None:
            plateau = t >= self.onset + self.ramp_time
            if t >= self.onset:
                self._peak_rate = max(self._peak_rate, abs(roll_rate))
            rate = math.degrees(abs(roll_rate))
            threshold_seen = math.degrees(self._peak_rate) > self.trigger_deg_s
            timed_out = t >= self.onset + self.ramp_time + self.max_wait
            if plateau and ((threshold_seen and rate < self.trigger_deg_s) or timed_out):
                self.reversal_time = t
            else:
                return first
        tr = self.reversal_time
        second = -amp + ramp(t, self.rate_deg_s, 2 * amp, tr)
        hold_end = tr + 2 * self.ramp_time + self.dwell
        if t <= hold_end:
            return second
        frac = min((t - hold_end) / self.return_time, 1.0)
        return amp * (1 - frac)

    def driver_input(self, t, obs):
        angle = self.wheel_angle(t, obs.roll_rate)
        if t < self.onset:
            return DriverInput(wheel_to_road(angle, self.steering_ratio), mode=SPEED_HOLD,
                               target_speed=self.initial_speed)
        return DriverInput(wheel_to_road(angle, self.steering_ratio), commanded_ax=0.0,
                           mode=ACCEL_COMMAND)


@dataclass
class SinusoidSteer(Maneuver):
    name = "sinusoid"
    frequency: float = 0.2
    amplitude_deg: float = 30.0
    speed_kmh: float = 100.0
    periods: int = 10

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        if self.periods < 10 or int(self.periods) != self.periods:
            raise ValueError("need an integer number of periods, at least 10")

    @property
    def initial_speed(self):
        return self.speed_kmh * KMH

    @property
    def duration(self):
        return self.periods / self.frequency

    def wheel_angle(self, t):
        return sinusoid_wheel(t, self.frequency, self.amplitude_deg)

    def driver_input(self, t, obs=None):
        return DriverInput(wheel_to_road(self.wheel_angle(t), self.steering_ratio),
                           mode=SPEED_HOLD, target_speed=self.initial_speed)


SINUSOID_FREQUENCIES = (0.2, 0.4, 0.6, 0.8, 1.0)
FISHHOOK_MES = (35.0, 40.0, 45.0, 50.0)

MANEUVERS = {
    "step-steer": StepSteer,
    "steady-cornering": SteadyCornering,
    "brake-in-turn": BrakeInTurn,
    "accel-brake": LongitudinalAccelBrake,
    "fishhook": Fishhook,
    "sinusoid": SinusoidSteer,
}
