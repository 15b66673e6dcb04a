"""Closed-loop simulation: maneuver driver, suspension controller, plant."""

from __future__ import annotations

import logging

import numpy as np

from .controllers import Controller, Measurement, PassiveController, actuator_track
from .maneuvers import (ACCEL_COMMAND, G, Fishhook, FishhookInitial, Maneuver, Observation,
                        Stage1NotConverged)
from .metrics import ROLLOVER_ANGLE, Telemetry
from .params import VehicleParams
from .vehicle import (F_ACT, F_SUSP, F_TX, F_TY, F_TZ, IP, IQ, IR, IROLL, IPITCH, IU,
                      NumericalDivergence, Plant, evaluate, input_vector, DriverCommand)

log = logging.getLogger(__name__)

DT = 1e-3
TERMINAL_ROLL = 1.4  # rad; integration stops here, rollover is flagged at 0.7 rad
STANDSTILL_TAU = 0.2  # s, brake hold below STOP_SPEED
STOP_SPEED = 0.5


class SpeedHold:
    """PI loop turning a target speed into an acceleration command."""

    def __init__(self, kp: float = 1.5, ki: float = 0.3):
        self.kp = kp
        self.ki = ki
        self.integral = 0.0

    def __call__(self, target: float, speed: float, dt: float) -> float:
        error = target - speed
        self.integral += error * dt
        return self.kp * error + self.ki * self.integral


def simulate(maneuver: Maneuver, controller: Controller | None, params: VehicleParams,
             dt: float = DT, duration: float | None = None, decimation: int = 1,
             stop_on_rollover: bool = True) -> Telemetry:
    """Run one maneuver and return decimated telemetry.

    The run ends early when |roll| passes 1.4 rad or the integration
    diverges; ``metadata['diverged']`` and ``metadata['terminated_at']``
    record why.
    """
    controller = controller or PassiveController(params)
    controller.reset()
    maneuver.reset()
    plant = Plant(params)
    duration = maneuver.duration if duration is None else duration
    n_steps = int(round(duration / dt))
    n_rec = n_steps // decimation + 1
    meta = {"maneuver": maneuver.metadata(), "dt": dt, "decimation": decimation,
            "vehicle": params.to_dict()}
    meta.update(controller.metadata())
    tel = Telemetry.allocate(n_rec, meta)

    y = plant.equilibrium(maneuver.initial_speed)
    torques = np.zeros(4)
    u = np.zeros(6)
    speed_hold = SpeedHold()
    mass = params.total_mass
    rec = 0
    diverged = False
    terminated = None

    for k in range(n_steps + 1):
        t = k * dt
        _, corner, ax, ay = evaluate(y, u, plant.packed)
        obs = Observation(vx=y[IU], yaw_rate=y[IR], roll_rate=y[IP], ax=ax, ay=ay)
        drv = maneuver.driver_input(t, obs)
        if drv.mode == ACCEL_COMMAND:
            ax_cmd = drv.commanded_ax
            if ax_cmd < 0 and y[IU] < STOP_SPEED:
                ax_cmd = max(ax_cmd, -y[IU] / STANDSTILL_TAU)
            speed_hold.integral = 0.0
        else:
            ax_cmd = speed_hold(drv.target_speed, y[IU], dt)

        meas = Measurement(pitch=y[IPITCH], roll=y[IROLL], ax=ax, ay=ay)
        reference = controller.update(meas, dt)
        # record before the torque update so that row k holds inputs applied over [t, t+dt)
        torques = actuator_track(reference, torques, dt, params)
        u = input_vector(DriverCommand(drv.steer_angle, mass * ax_cmd), torques)

        if k % decimation == 0:
            _, corner, ax, ay = evaluate(y, u, plant.packed)
            tel.time[rec] = t
            tel.state[rec] = y
            tel.tire_fz[rec] = corner[F_TZ]
            tel.tire_fy[rec] = corner[F_TY]
            tel.tire_fx[rec] = corner[F_TX]
            tel.susp_force[rec] = corner[F_SUSP]
            tel.act_force[rec] = corner[F_ACT]
            tel.torque_ref[rec] = reference
            tel.torque[rec] = torques
            tel.torque_ff[rec] = controller.last_ff
            tel.torque_pid[rec] = controller.last_pid
            tel.ax[rec] = ax
            tel.ay[rec] = ay
            tel.steer[rec] = drv.steer_angle
            tel.ax_cmd[rec] = ax_cmd
            rec += 1

        if k == n_steps:
            break
        if stop_on_rollover and abs(y[IROLL]) > TERMINAL_ROLL:
            terminated = t
            break
        try:
            y = plant.step(y, u, dt)
        except NumericalDivergence as exc:
            log.warning("integration diverged at t=%.3f s: %s", t, exc)
            diverged = True
            terminated = t
            break

    tel = tel.truncate(rec)
    tel.metadata["diverged"] = diverged
    tel.metadata["terminated_at"] = terminated
    if isinstance(maneuver, Fishhook):
        tel.metadata["reversal_time"] = maneuver.reversal_time
    return tel


def fishhook_delta_ini(params: VehicleParams, stage1: FishhookInitial | None = None,
                       dt: float = DT) -> float:
    """Steering-wheel angle [deg] at which stage 1 first reaches 0.3 g."""
    stage1 = stage1 or FishhookInitial()
    tel = simulate(stage1, PassiveController(params), params, dt=dt, decimation=10)
    target = stage1.target_g * G
    hit = np.nonzero(np.abs(tel.ay) >= target)[0]
    if hit.size == 0:
        raise Stage1NotConverged(f"lateral acceleration stayed below {stage1.target_g} g")
    i = hit[0]
    if i == 0:
        return stage1.wheel_angle(tel.time[0])
    # interpolate the crossing between decimated samples
    a0, a1 = abs(tel.ay[i - 1]), abs(tel.ay[i])
    t = tel.time[i - 1] + (target - a0) / (a1 - a0) * (tel.time[i] - tel.time[i - 1])
    return stage1.wheel_angle(t)


def run_fishhook(params: VehicleParams, controller: Controller, mes_mph: float,
                 delta_ini_deg: float | None = None, dt: float = DT,
                 decimation: int = 1) -> Telemetry:
    """Two-stage fishhook; stage 1 always runs passive at 50 mph."""
    if delta_ini_deg is None:
        delta_ini_deg = fishhook_delta_ini(params, dt=dt)
    maneuver = Fishhook(mes_mph=mes_mph, delta_ini_deg=delta_ini_deg)
    tel = simulate(maneuver, controller, params, dt=dt, decimation=decimation)
    tel.metadata["delta_ini_deg"] = delta_ini_deg
    return tel


def rolled_over(tel: Telemetry) -> bool:
    return bool(np.any(np.abs(tel.roll) > ROLLOVER_ANGLE)) or bool(tel.metadata.get("diverged"))
