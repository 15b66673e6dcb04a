"""14-DOF full-car plant.

Chassis: 6 DOF rigid body (lumped with the wheels for planar motion).
Corners: 4 vertical unsprung masses joined to the chassis by a
spring-damper-actuator unit and to the ground by a linear tire.

Sign conventions
----------------
Horizontal axes follow SAE J670: x forward, y right, yaw positive turning
right.  Vertical quantities are heights above the ground (up positive).
Roll is positive right-side-down, pitch positive nose-up.  Positive rocker
torque pushes the chassis up at its corner.

The suspension force of each corner acts at a chassis-fixed point that sits
on the ground plane at rest, directly below the corner.  Horizontal tire
forces enter the chassis at the axle roll centre, a chassis point on the
centreline at ground level, so the load-transfer arm is the full CMC
height and does not grow with body roll.  A torsional anti-roll bar per
axle acts on the left-right suspension compression difference.  The vertical
equations are Lagrangian in (z, roll, pitch, z_u): with zero speed the
model conserves energy apart from the dampers.

Roll, pitch and yaw rates in the state are Euler-angle rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .params import VehicleParams

N_STATE = 20
N_INPUT = 6

# state layout
IX, IY, IZ, IROLL, IPITCH, IYAW = 0, 1, 2, 3, 4, 5
IU, IV, IW, IP, IQ, IR = 6, 7, 8, 9, 10, 11
IZU = slice(12, 16)
IWU = slice(16, 20)

# corner quantity rows returned by the force kernel
F_TZ, F_TY, F_TX, F_SUSP, F_ACT, F_BX, F_BY, F_SLIP = range(8)

# packed parameter layout
(P_MS, P_M, P_H, P_KT, P_CT, P_IX, P_IY, P_IZ, P_C1, P_C2, P_MU, P_FCF, P_G,
 P_CADF, P_CADR, P_VFADE) = range(16)
P_CORNER = 16  # then 4 blocks of per-corner values
(C_X, C_Y, C_MU_, C_R, C_K, C_C, C_BETA, C_PRE, C_L0, C_SHARE, C_ARB) = range(11)
N_CORNER_FIELDS = 11
N_PARAMS = P_CORNER + 4 * N_CORNER_FIELDS

# lateral tire forces fade in below this speed [m/s]
LOW_SPEED = 1.0

# sanity bounds; beyond them the integration is declared diverged
MAX_HEIGHT = 20.0
MAX_SPEED = 200.0
MAX_RATE = 100.0


class NumericalDivergence(RuntimeError):
    """The integrated state left its sanity bounds or became non-finite."""


@dataclass
class VehicleState:
    """Plant state at one instant.

    Corner arrays follow FL, FR, RL, RR.
    """

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    unsprung_heights: np.ndarray = field(default_factory=lambda: np.zeros(4))
    unsprung_velocities: np.ndarray = field(default_factory=lambda: np.zeros(4))
    time: float = 0.0

    @property
    def roll(self) -> float:
        return float(self.attitude[0])

    @property
    def pitch(self) -> float:
        return float(self.attitude[1])

    @property
    def yaw(self) -> float:
        return float(self.attitude[2])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.attitude, self.velocity,
                               self.angular_velocity, self.unsprung_heights,
                               self.unsprung_velocities]).astype(float)

    @classmethod
    def from_vector(cls, y, time: float = 0.0) -> "VehicleState":
        y = np.asarray(y, dtype=float)
        return cls(y[0:3].copy(), y[3:6].copy(), y[6:9].copy(), y[9:12].copy(),
                   y[12:16].copy(), y[16:20].copy(), float(time))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_vector())))


@dataclass
class CornerForces:
    """Per-corner forces [N]; tire forces are in the wheel frame."""

    vertical_tire_force: np.ndarray
    lateral_tire_force: np.ndarray
    longitudinal_tire_force: np.ndarray
    suspension_force: np.ndarray
    actuator_equivalent_force: np.ndarray


@dataclass
class DriverCommand:
    """Plant-level input: road-wheel steer and total longitudinal force."""

    steer: float = 0.0
    longitudinal_force: float = 0.0


# ---------------------------------------------------------------------------
# scalar force laws


def tire_vertical_force(compression: float, compression_rate: float,
                        params: VehicleParams) -> float:
    """Linear tire spring-damper against flat ground, clamped at lift-off."""
    if compression <= 0.0:
        return 0.0
    return max(0.0, params.tire_stiffness * compression
               + params.tire_damping * compression_rate)


def compute_tire_vertical_force(state: VehicleState, params: VehicleParams,
                                corner: int) -> float:
    """Vertical tire force at ``corner`` (1..4) for the given state."""
    if corner not in (1, 2, 3, 4):
        raise ValueError(f"corner must be 1..4, got {corner}")
    i = corner - 1
    compression = params.wheel_radii[i] - state.unsprung_heights[i]
    return tire_vertical_force(compression, -state.unsprung_velocities[i], params)


def cornering_stiffness(vertical_load, params: VehicleParams, front: bool = False):
    c1, c2 = params.cornering_stiffness_coeffs
    c = np.maximum(c1 * vertical_load - c2 * vertical_load ** 2, 0.0)
    return c * params.front_cornering_factor if front else c


def compute_lateral_tire_force(vertical_load: float, slip_angle: float,
                               params: VehicleParams, front: bool = False,
                               longitudinal_force: float = 0.0) -> float:
    """Load-sensitive linear tire with friction saturation.

    Positive slip angle gives a negative (restoring) force.  The rear
    cornering stiffness is ``c1*Fz - c2*Fz**2``; the front one is scaled by
    ``front_cornering_factor``.  A longitudinal force shrinks the lateral
    limit along the friction ellipse.
    """
    if vertical_load < 0:
        raise ValueError("vertical load must be non-negative")
    limit_sq = (params.friction_coefficient * vertical_load) ** 2 - longitudinal_force ** 2
    limit = math.sqrt(limit_sq) if limit_sq > 0 else 0.0
    raw = float(cornering_stiffness(vertical_load, params, front)) * slip_angle
    return -min(max(raw, -limit), limit)


# ---------------------------------------------------------------------------
# packed kernels


def pack_params(params: VehicleParams) -> np.ndarray:
    """Flatten parameters and static reference geometry for the kernels."""
    p = np.zeros(N_PARAMS)
    p[P_MS] = params.sprung_mass
    p[P_M] = params.total_mass
    p[P_H] = params.cmc_height
    p[P_KT] = params.tire_stiffness
    p[P_CT] = params.tire_damping
    p[P_IX] = params.roll_inertia
    p[P_IY] = params.pitch_inertia
    p[P_IZ] = params.yaw_inertia
    p[P_C1], p[P_C2] = params.cornering_stiffness_coeffs
    p[P_MU] = params.friction_coefficient
    p[P_FCF] = params.front_cornering_factor
    p[P_G] = params.gravity
    p[P_CADF] = params.aero_coeff_front
    p[P_CADR] = params.aero_coeff_rear
    p[P_VFADE] = LOW_SPEED
    x, y = params.corner_x, params.corner_y
    radii = params.wheel_radii
    stiff = [params.spring_stiffness_front] * 2 + [params.spring_stiffness_rear] * 2
    damp = [params.suspension_damping_front] * 2 + [params.suspension_damping_rear] * 2
    pre = params.static_sprung_loads
    tire_static = params.static_tire_loads
    share = np.array([params.wheelbase_rear] * 2 + [params.wheelbase_front] * 2) / (2 * params.wheelbase)
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        zu0 = radii[i] - tire_static[i] / params.tire_stiffness
        p[base + C_X] = x[i]
        p[base + C_Y] = y[i]
        p[base + C_MU_] = params.unsprung_masses[i]
        p[base + C_R] = radii[i]
        p[base + C_K] = stiff[i]
        p[base + C_C] = damp[i]
        p[base + C_BETA] = params.beta_map[i]
        p[base + C_PRE] = pre[i]
        # chassis point sits on the ground at rest: reference length 0 - zu0
        p[base + C_L0] = -zu0
        p[base + C_SHARE] = share[i]
        # anti-roll bar as a vertical rate on the left-right compression difference
        track = params.track_front if i < 2 else params.track_rear
        bar = params.anti_roll_stiffness_front if i < 2 else params.anti_roll_stiffness_rear
        p[base + C_ARB] = bar / track ** 2
    return p


@numba.njit(cache=True)
def _evaluate(y, u, p, dy, out):
    """Fill ``dy`` with the state derivative and ``out`` with corner forces.

    Returns the planar body accelerations (ax, ay).
    """
    ms = p[P_MS]
    mtot = p[P_M]
    h = p[P_H]
    g = p[P_G]
    mu = p[P_MU]
    vfade = p[P_VFADE]

    z = y[IZ]
    roll = y[IROLL]
    pitch = y[IPITCH]
    yaw = y[IYAW]
    vx = y[IU]
    vy = y[IV]
    vz = y[IW]
    roll_rate = y[IP]
    pitch_rate = y[IQ]
    yaw_rate = y[IR]

    sr = math.sin(roll)
    cr = math.cos(roll)
    sp = math.sin(pitch)
    cp = math.cos(pitch)

    steer = u[0]
    f_long = u[5]
    cs = math.cos(steer)
    ss = math.sin(steer)

    aero_front = 0.5 * p[P_CADF] * vx * vx
    aero_rear = 0.5 * p[P_CADR] * vx * vx

    dzdroll = np.empty(4)
    dzdpitch = np.empty(4)
    dxdroll = np.empty(4)
    dxdpitch = np.empty(4)
    dydroll = np.empty(4)
    vertical = np.empty(4)

    compression = np.empty(4)
    compression_rate = np.empty(4)

    # vertical: suspension and tires
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        xi = p[base + C_X]
        yi = p[base + C_Y]
        # corner point (xi, yi, -h) after roll then pitch
        ylat = yi * cr - h * sr
        zr = -yi * sr - h * cr
        xlon = xi * cp - zr * sp
        dzdroll[i] = -ylat * cp
        dzdpitch[i] = xlon
        zup = xi * sp + zr * cp
        # horizontal forces enter at the axle roll centre (xi, 0, -h)
        dxdroll[i] = -h * sr * sp
        dxdpitch[i] = h * cr * cp - xi * sp
        dydroll[i] = -h * cr

        height = z + zup
        height_rate = vz + dzdroll[i] * roll_rate + dzdpitch[i] * pitch_rate
        compression[i] = p[base + C_L0] - (height - y[12 + i])
        compression_rate[i] = -(height_rate - y[16 + i])

    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        zu = y[12 + i]
        wu = y[16 + i]
        other = i + 1 if i % 2 == 0 else i - 1
        f_susp = (p[base + C_PRE] + p[base + C_K] * compression[i]
                  + p[base + C_C] * compression_rate[i]
                  + p[base + C_ARB] * (compression[i] - compression[other]))
        f_act = p[base + C_BETA] * u[1 + i]
        aero = aero_front if i < 2 else aero_rear
        vertical[i] = f_susp + f_act - aero

        tire_comp = p[base + C_R] - zu
        fz = 0.0
        if tire_comp > 0.0:
            fz = p[P_KT] * tire_comp - p[P_CT] * wu
            if fz < 0.0:
                fz = 0.0
        out[F_TZ, i] = fz
        out[F_SUSP, i] = f_susp
        out[F_ACT, i] = f_act

    # longitudinal: nominal axle split, clipped by friction, spill-over to
    # corners with spare grip
    fx = np.empty(4)
    assigned = 0.0
    spare_total = 0.0
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        cap = mu * out[F_TZ, i]
        want = p[base + C_SHARE] * f_long
        if want > cap:
            want = cap
        elif want < -cap:
            want = -cap
        fx[i] = want
        assigned += want
        spare_total += cap - abs(want)
    rest = f_long - assigned
    if rest != 0.0 and spare_total > 0.0:
        for i in range(4):
            spare = mu * out[F_TZ, i] - abs(fx[i])
            fx[i] += rest * spare / spare_total
        # a single spill pass can overshoot only by rounding
        for i in range(4):
            cap = mu * out[F_TZ, i]
            if fx[i] > cap:
                fx[i] = cap
            elif fx[i] < -cap:
                fx[i] = -cap

    fade = abs(vx) / vfade
    if fade > 1.0:
        fade = 1.0

    sum_fx = 0.0
    sum_fy = 0.0
    yaw_moment = 0.0
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        xi = p[base + C_X]
        yi = p[base + C_Y]
        fz = out[F_TZ, i]
        vxi = vx - yaw_rate * yi
        vyi = vy + yaw_rate * xi
        vx_eff = vxi if vxi > vfade else vfade
        delta = steer if i < 2 else 0.0
        slip = math.atan2(vyi, vx_eff) - delta
        stiffness = p[P_C1] * fz - p[P_C2] * fz * fz
        if stiffness < 0.0:
            stiffness = 0.0
        if i < 2:
            stiffness *= p[P_FCF]
        limit_sq = (mu * fz) ** 2 - fx[i] ** 2
        limit = math.sqrt(limit_sq) if limit_sq > 0.0 else 0.0
        fy = -stiffness * slip
        if fy > limit:
            fy = limit
        elif fy < -limit:
            fy = -limit
        fy *= fade
        if i < 2:
            fbx = fx[i] * cs - fy * ss
            fby = fx[i] * ss + fy * cs
        else:
            fbx = fx[i]
            fby = fy
        out[F_TY, i] = fy
        out[F_TX, i] = fx[i]
        out[F_BX, i] = fbx
        out[F_BY, i] = fby
        out[F_SLIP, i] = slip
        sum_fx += fbx
        sum_fy += fby
        yaw_moment += xi * fby - yi * fbx

    ax = sum_fx / mtot
    ay = sum_fy / mtot

    heave_force = 0.0
    roll_moment = 0.0
    pitch_moment = 0.0
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        mu_i = p[base + C_MU_]
        fxs = out[F_BX, i] - mu_i * ax
        fys = out[F_BY, i] - mu_i * ay
        heave_force += vertical[i]
        roll_moment += vertical[i] * dzdroll[i] + fxs * dxdroll[i] + fys * dydroll[i]
        pitch_moment += vertical[i] * dzdpitch[i] + fxs * dxdpitch[i]

    cy = math.cos(yaw)
    sy = math.sin(yaw)
    dy[IX] = vx * cy - vy * sy
    dy[IY] = vx * sy + vy * cy
    dy[IZ] = vz
    dy[IROLL] = roll_rate
    dy[IPITCH] = pitch_rate
    dy[IYAW] = yaw_rate
    dy[IU] = ax + vy * yaw_rate
    dy[IV] = ay - vx * yaw_rate
    dy[IW] = heave_force / ms - g
    dy[IP] = roll_moment / p[P_IX]
    dy[IQ] = pitch_moment / p[P_IY]
    dy[IR] = yaw_moment / p[P_IZ]
    for i in range(4):
        base = P_CORNER + i * N_CORNER_FIELDS
        mu_i = p[base + C_MU_]
        dy[12 + i] = y[16 + i]
        dy[16 + i] = (out[F_TZ, i] - out[F_SUSP, i] - out[F_ACT, i]) / mu_i - g
    return ax, ay


@numba.njit(cache=True)
def _rk4(y, u, p, dt):
    n = y.shape[0]
    out = np.empty((8, 4))
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    _evaluate(y, u, p, k1, out)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * dt * k1[j]
    _evaluate(tmp, u, p, k2, out)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * dt * k2[j]
    _evaluate(tmp, u, p, k3, out)
    for j in range(n):
        tmp[j] = y[j] + dt * k3[j]
    _evaluate(tmp, u, p, k4, out)
    res = np.empty(n)
    for j in range(n):
        res[j] = y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return res


def evaluate(y: np.ndarray, u: np.ndarray, packed: np.ndarray):
    """State derivative, corner force table and body accelerations."""
    dy = np.empty(N_STATE)
    out = np.empty((8, 4))
    ax, ay = _evaluate(np.asarray(y, dtype=float), np.asarray(u, dtype=float), packed, dy, out)
    return dy, out, ax, ay


def input_vector(command: DriverCommand, torques) -> np.ndarray:
    u = np.empty(N_INPUT)
    u[0] = command.steer
    u[1:5] = torques
    u[5] = command.longitudinal_force
    return u


def check_finite(y: np.ndarray) -> None:
    if not np.all(np.isfinite(y)):
        raise NumericalDivergence("non-finite state")
    if (abs(y[IZ]) > MAX_HEIGHT or np.any(np.abs(y[IZU]) > MAX_HEIGHT)
            or abs(y[IU]) > MAX_SPEED or abs(y[IV]) > MAX_SPEED
            or np.any(np.abs(y[IP:IR + 1]) > MAX_RATE)):
        raise NumericalDivergence("state exceeded sanity bounds")


class Plant:
    """Holds packed parameters and advances the plant with fixed-step RK4."""

    def __init__(self, params: VehicleParams):
        self.params = params
        self.packed = pack_params(params)

    def equilibrium(self, speed: float = 0.0) -> np.ndarray:
        """Static equilibrium state vector, driving straight at ``speed``."""
        p = self.params
        y = np.zeros(N_STATE)
        y[IZ] = p.cmc_height
        y[IU] = speed
        y[IZU] = p.wheel_radii - p.static_tire_loads / p.tire_stiffness
        return y

    def step(self, y: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
        if not 0.0 < dt <= 0.005:
            raise ValueError(f"dt must lie in (0, 0.005], got {dt}")
        y_next = _rk4(y, u, self.packed, dt)
        check_finite(y_next)
        return y_next

    def corner_forces(self, y: np.ndarray, u: np.ndarray) -> CornerForces:
        _, out, _, _ = evaluate(y, u, self.packed)
        return CornerForces(out[F_TZ].copy(), out[F_TY].copy(), out[F_TX].copy(),
                            out[F_SUSP].copy(), out[F_ACT].copy())

    def energy(self, y: np.ndarray) -> float:
        """Mechanical energy relative to the static equilibrium [J].

        Exact for the vertical subsystem; planar motion adds kinetic energy
        of the lumped vehicle.
        """
        p = self.params
        pk = self.packed
        m = p.total_mass
        e = 0.5 * m * (y[IU] ** 2 + y[IV] ** 2) + 0.5 * p.yaw_inertia * y[IR] ** 2
        e += 0.5 * p.sprung_mass * y[IW] ** 2
        e += 0.5 * p.roll_inertia * y[IP] ** 2 + 0.5 * p.pitch_inertia * y[IQ] ** 2
        e += p.sprung_mass * p.gravity * (y[IZ] - p.cmc_height)
        sr, cr = np.sin(y[IROLL]), np.cos(y[IROLL])
        sp, cp = np.sin(y[IPITCH]), np.cos(y[IPITCH])
        zu0 = p.wheel_radii - p.static_tire_loads / p.tire_stiffness
        comp = np.empty(4)
        for i in range(4):
            base = P_CORNER + i * N_CORNER_FIELDS
            xi, yi = pk[base + C_X], pk[base + C_Y]
            zr = -yi * sr - p.cmc_height * cr
            height = y[IZ] + xi * sp + zr * cp
            s = pk[base + C_L0] - (height - y[12 + i])
            comp[i] = s
            e += pk[base + C_PRE] * s + 0.5 * pk[base + C_K] * s ** 2
            mu_i = pk[base + C_MU_]
            e += 0.5 * mu_i * y[16 + i] ** 2 + mu_i * p.gravity * (y[12 + i] - zu0[i])
            tire = pk[base + C_R] - y[12 + i]
            comp0 = pk[base + C_R] - zu0[i]
            # tire spring energy measured from its static compression
            if tire > 0:
                e += 0.5 * p.tire_stiffness * tire ** 2
            e -= 0.5 * p.tire_stiffness * comp0 ** 2
        for i in (0, 2):
            e += 0.5 * pk[P_CORNER + i * N_CORNER_FIELDS + C_ARB] * (comp[i] - comp[i + 1]) ** 2
        return float(e)


def step_dynamics(state: VehicleState, torques, command: DriverCommand,
                  params: VehicleParams, dt: float) -> VehicleState:
    """Advance ``state`` by one RK4 step of ``dt`` seconds.

    Convenience wrapper; simulation loops should hold a :class:`Plant` and
    work on state vectors.
    """
    plant = Plant(params)
    u = input_vector(command, np.asarray(torques, dtype=float))
    y = plant.step(state.to_vector(), u, dt)
    return VehicleState.from_vector(y, state.time + dt)
