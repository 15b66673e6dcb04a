"""Vertical tire force increment models and the force/torque conversion.

Two models predict the per-corner load change ``dFz`` from the chassis
accelerations:

* the closed-form steady-state law (pitch and roll moment balance plus
  aerodynamic downforce), and
* a polynomial fit identified on the nonlinear plant: cubic in ``ay``,
  linear in ``ax``, both without a constant term.

The rocker torque that produces a vertical force ``dFz`` at a corner is
``dFz / beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import ConfigError, VehicleParams

# sign patterns of the load increments, corners FL FR RL RR
AX_PATTERN = np.array([1.0, 1.0, -1.0, -1.0])
AY_PATTERN = np.array([1.0, -1.0, 1.0, -1.0])


@dataclass
class LoadTransferIncrement:
    """Per-corner vertical tire force increments [N].

    ``components`` has shape (4, 3): columns are the ax, ay and aero parts.
    """

    components: np.ndarray

    @property
    def per_corner(self) -> np.ndarray:
        return self.components.sum(axis=1)

    @property
    def ax_part(self) -> np.ndarray:
        return self.components[:, 0]

    @property
    def ay_part(self) -> np.ndarray:
        return self.components[:, 1]

    @property
    def aero_part(self) -> np.ndarray:
        return self.components[:, 2]


def _moment_arm_mass(params: VehicleParams) -> float:
    """m_s h + 2 (m_uf R_f + m_ur R_r) [kg m]."""
    return (params.sprung_mass * params.cmc_height
            + 2 * (params.unsprung_mass_front * params.wheel_radius_front
                   + params.unsprung_mass_rear * params.wheel_radius_rear))


def steady_state_ax_increment(ax: float, params: VehicleParams) -> float:
    """Front-corner increment from the pitch moment balance."""
    return _moment_arm_mass(params) * ax / (2 * params.wheelbase)


def steady_state_ay_increment(ay: float, params: VehicleParams) -> tuple[float, float]:
    """(front, rear) corner-1/corner-3 increments from the roll moment balance.

    The overturning moment is split by the OCD ratio: the rear axle takes
    ``ocd_rear_ratio`` of it.
    """
    moment = _moment_arm_mass(params) * ay
    sigma = params.ocd_rear_ratio
    return (1 - sigma) * moment / params.track_front, sigma * moment / params.track_rear


def aero_increment(vx: float, params: VehicleParams) -> tuple[float, float]:
    """Per-corner aerodynamic downforce, front and rear [N]."""
    if vx < 0:
        raise ValueError("vx must be non-negative")
    return 0.5 * params.aero_coeff_front * vx ** 2, 0.5 * params.aero_coeff_rear * vx ** 2


def steady_state_increment(ax: float, ay: float, vx: float,
                           params: VehicleParams) -> LoadTransferIncrement:
    """Assemble the closed-form model for all four corners."""
    dx = steady_state_ax_increment(ax, params)
    front, rear = steady_state_ay_increment(ay, params)
    aero_f, aero_r = aero_increment(vx, params)
    comp = np.empty((4, 3))
    comp[:, 0] = dx * AX_PATTERN
    comp[:, 1] = np.array([front, front, rear, rear]) * AY_PATTERN
    comp[:, 2] = [aero_f, aero_f, aero_r, aero_r]
    return LoadTransferIncrement(comp)


@dataclass
class CompensationCoefficients:
    """Fitted zero-intercept polynomials, one row per corner.

    ``lateral_poly[i] = (p1, p2, p3)`` multiplies ``(ay, ay**2, ay**3)``;
    ``longitudinal_slope[i]`` multiplies ``ax``.  The RMS residuals of the
    fit are carried along for reporting.
    """

    lateral_poly: np.ndarray
    longitudinal_slope: np.ndarray
    lateral_rms: np.ndarray = field(default_factory=lambda: np.zeros(4))
    longitudinal_rms: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        self.lateral_poly = np.asarray(self.lateral_poly, dtype=float).reshape(4, 3)
        self.longitudinal_slope = np.asarray(self.longitudinal_slope, dtype=float).reshape(4)
        self.lateral_rms = np.asarray(self.lateral_rms, dtype=float).reshape(4)
        self.longitudinal_rms = np.asarray(self.longitudinal_rms, dtype=float).reshape(4)

    @classmethod
    def from_steady_state(cls, params: VehicleParams) -> "CompensationCoefficients":
        """Linear coefficients equivalent to the closed-form model."""
        dx = steady_state_ax_increment(1.0, params)
        front, rear = steady_state_ay_increment(1.0, params)
        lat = np.zeros((4, 3))
        lat[:, 0] = np.array([front, front, rear, rear]) * AY_PATTERN
        return cls(lat, dx * AX_PATTERN)

    def antisymmetry_error(self) -> tuple[np.ndarray, np.ndarray]:
        """Deviation from the left/right and front/rear sign structure.

        Returns (lateral, longitudinal) residuals: lateral rows compare
        corner 2 to -corner 1 and corner 4 to -corner 3; longitudinal
        entries compare the two front slopes, the two rear slopes and the
        front mean against the negated rear mean.
        """
        lat = np.vstack([self.lateral_poly[1] + self.lateral_poly[0],
                         self.lateral_poly[3] + self.lateral_poly[2]])
        s = self.longitudinal_slope
        lon = np.array([s[0] - s[1], s[2] - s[3], (s[0] + s[1]) / 2 + (s[2] + s[3]) / 2])
        return lat, lon

    def save(self, path: str | Path) -> None:
        """Plain-text file, one row per corner.

        Columns: corner, p1, p2, p3, slope, lateral_rms, longitudinal_rms.
        """
        table = np.column_stack([np.arange(1, 5), self.lateral_poly, self.longitudinal_slope,
                                 self.lateral_rms, self.longitudinal_rms])
        header = ("compensation coefficients, corners FL FR RL RR\n"
                  "dFz = p1*ay + p2*ay^2 + p3*ay^3 + slope*ax  [N, m/s^2]\n"
                  "corner p1 p2 p3 slope lateral_rms longitudinal_rms")
        np.savetxt(path, table, fmt=["%d"] + ["%.17g"] * 6, header=header)

    @classmethod
    def load(cls, path: str | Path) -> "CompensationCoefficients":
        table = np.loadtxt(path, ndmin=2)
        if table.shape != (4, 7):
            raise ConfigError(f"coefficient file {path} must have 4 rows of 7 columns")
        order = np.argsort(table[:, 0])
        table = table[order]
        if not np.array_equal(table[:, 0], [1, 2, 3, 4]):
            raise ConfigError("coefficient file must list corners 1..4")
        return cls(table[:, 1:4], table[:, 4], table[:, 5], table[:, 6])


def poly_fit_increment(ax: float, ay: float,
                       coeffs: CompensationCoefficients) -> LoadTransferIncrement:
    """Evaluate the fitted model; the aero column is always zero."""
    powers = np.array([ay, ay ** 2, ay ** 3])
    comp = np.zeros((4, 3))
    comp[:, 0] = coeffs.longitudinal_slope * ax
    comp[:, 1] = coeffs.lateral_poly @ powers
    return LoadTransferIncrement(comp)


def force_to_torque(increment, beta):
    """Rocker torque producing a vertical force ``increment`` [N m]."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta == 0):
        raise ConfigError("beta must be non-zero")
    return np.asarray(increment, dtype=float) / beta


def torque_to_force(torque, beta):
    """Vertical force produced by a rocker ``torque`` [N]."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta == 0):
        raise ConfigError("beta must be non-zero")
    return np.asarray(torque, dtype=float) * beta
