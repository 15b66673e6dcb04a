"""Vehicle parameters, controller gains and the YAML config loader."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml


class ConfigError(ValueError):
    """Raised for invalid or inconsistent configuration values."""


@dataclass(frozen=True)
class VehicleParams:
    """Full-car parameters in SI units.

    Corner order everywhere in the package is FL, FR, RL, RR.
    """

    sprung_mass: float = 2700.0
    unsprung_mass_front: float = 62.5
    unsprung_mass_rear: float = 62.5
    cmc_height: float = 0.71
    wheelbase_front: float = 1.538
    wheelbase_rear: float = 1.538
    track_front: float = 1.677
    track_rear: float = 1.696
    wheel_radius_front: float = 0.385
    wheel_radius_rear: float = 0.385
    spring_stiffness_front: float = 53500.0
    spring_stiffness_rear: float = 53100.0
    tire_stiffness: float = 290000.0
    tire_damping: float = 300.0
    ocd_rear_ratio: float = 0.43
    peak_torque_front: float = 273.0
    peak_torque_rear: float = 273.0
    continuous_torque_front: float = 166.0
    continuous_torque_rear: float = 165.0
    aero_coeff_front: float = 0.0
    aero_coeff_rear: float = 0.0
    suspension_damping_front: float = 3605.6
    suspension_damping_rear: float = 3592.1
    anti_roll_stiffness_front: float = 26100.0
    anti_roll_stiffness_rear: float = 0.0
    roll_inertia: float = 900.0
    pitch_inertia: float = 3000.0
    yaw_inertia: float = 3200.0
    cornering_stiffness_coeffs: tuple[float, float] = (20.0, 5.0e-4)
    front_cornering_factor: float = 0.75
    friction_coefficient: float = 1.1
    beta_map: tuple[float, float, float, float] = (20.0, 20.0, 20.0, 20.0)
    actuator_time_constant: float = 0.01
    gravity: float = 9.81

    def __post_init__(self):
        # YAML 1.1 reads "1.0e9" as a string, so coerce every scalar here
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            try:
                if f.name in ("cornering_stiffness_coeffs", "beta_map"):
                    value = tuple(float(v) for v in value)
                else:
                    value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{f.name} must be numeric, got {value!r}") from None
            object.__setattr__(self, f.name, value)
        positive = [
            "sprung_mass", "unsprung_mass_front", "unsprung_mass_rear", "cmc_height",
            "wheelbase_front", "wheelbase_rear", "track_front", "track_rear",
            "wheel_radius_front", "wheel_radius_rear", "spring_stiffness_front",
            "spring_stiffness_rear", "tire_stiffness", "roll_inertia", "pitch_inertia",
            "yaw_inertia", "friction_coefficient", "actuator_time_constant", "gravity",
            "peak_torque_front", "peak_torque_rear",
        ]
        for name in positive:
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if not 0.0 <= self.ocd_rear_ratio <= 1.0:
            raise ConfigError(f"ocd_rear_ratio must lie in [0, 1], got {self.ocd_rear_ratio}")
        if len(self.beta_map) != 4:
            raise ConfigError("beta_map needs one entry per corner")
        if any(b == 0 for b in self.beta_map):
            raise ConfigError("beta_map entries must be non-zero")
        if len(self.cornering_stiffness_coeffs) != 2:
            raise ConfigError("cornering_stiffness_coeffs is a (c1, c2) pair")
        for name in ("tire_damping", "suspension_damping_front", "suspension_damping_rear",
                     "aero_coeff_front", "aero_coeff_rear", "front_cornering_factor",
                     "anti_roll_stiffness_front", "anti_roll_stiffness_rear"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")

    @property
    def total_mass(self) -> float:
        return self.sprung_mass + 2 * self.unsprung_mass_front + 2 * self.unsprung_mass_rear

    @property
    def wheelbase(self) -> float:
        return self.wheelbase_front + self.wheelbase_rear

    @property
    def corner_x(self) -> np.ndarray:
        """Longitudinal corner offsets from the CMC, forward positive."""
        return np.array([self.wheelbase_front, self.wheelbase_front,
                         -self.wheelbase_rear, -self.wheelbase_rear])

    @property
    def corner_y(self) -> np.ndarray:
        """Lateral corner offsets from the CMC, right positive."""
        return np.array([-self.track_front, self.track_front,
                         -self.track_rear, self.track_rear]) / 2.0

    @property
    def unsprung_masses(self) -> np.ndarray:
        return np.array([self.unsprung_mass_front] * 2 + [self.unsprung_mass_rear] * 2)

    @property
    def wheel_radii(self) -> np.ndarray:
        return np.array([self.wheel_radius_front] * 2 + [self.wheel_radius_rear] * 2)

    @property
    def peak_torques(self) -> np.ndarray:
        return np.array([self.peak_torque_front] * 2 + [self.peak_torque_rear] * 2)

    @property
    def continuous_torques(self) -> np.ndarray:
        return np.array([self.continuous_torque_front] * 2 + [self.continuous_torque_rear] * 2)

    @property
    def static_sprung_loads(self) -> np.ndarray:
        """Per-corner share of the sprung weight at rest [N]."""
        w = self.sprung_mass * self.gravity / (2 * self.wheelbase)
        return np.array([w * self.wheelbase_rear] * 2 + [w * self.wheelbase_front] * 2)

    @property
    def static_tire_loads(self) -> np.ndarray:
        return self.static_sprung_loads + self.unsprung_masses * self.gravity

    def replace(self, **changes) -> "VehicleParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["cornering_stiffness_coeffs"] = list(self.cornering_stiffness_coeffs)
        d["beta_map"] = list(self.beta_map)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VehicleParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown vehicle parameter(s): {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class PidGains:
    """(Kp, Ki, Kd) per objective and axle.

    Units are N m/rad, N m/(rad s) and N m s/rad.
    """

    pitch_front: tuple[float, float, float] = (1000.0, 20000.0, 4.0)
    pitch_rear: tuple[float, float, float] = (1000.0, 20000.0, 4.0)
    roll_front: tuple[float, float, float] = (500.0, 5000.0, 4.0)
    roll_rear: tuple[float, float, float] = (500.0, 5000.0, 4.0)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            triple = tuple(float(g) for g in getattr(self, f.name))
            if len(triple) != 3:
                raise ConfigError(f"{f.name} needs (Kp, Ki, Kd)")
            if any(g < 0 for g in triple):
                raise ConfigError(f"{f.name} gains must be non-negative, got {triple}")
            object.__setattr__(self, f.name, triple)

    @classmethod
    def from_dict(cls, d: dict) -> "PidGains":
        try:
            return cls(pitch_front=d["pitch"]["front"], pitch_rear=d["pitch"]["rear"],
                       roll_front=d["roll"]["front"], roll_rear=d["roll"]["rear"])
        except KeyError as exc:
            raise ConfigError(f"gain block is missing {exc}") from None

    def to_dict(self) -> dict:
        return {"pitch": {"front": list(self.pitch_front), "rear": list(self.pitch_rear)},
                "roll": {"front": list(self.roll_front), "rear": list(self.roll_rear)}}


PALS_PID_GAINS = PidGains()
FF_PID_NON_GAINS = PidGains(pitch_front=(100.0, 2500.0, 2.0), pitch_rear=(100.0, 2500.0, 2.0),
                            roll_front=(50.0, 1500.0, 2.0), roll_rear=(50.0, 1500.0, 2.0))


@dataclass
class Config:
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    gains: dict[str, PidGains] = field(default_factory=lambda: {
        "pals-pid": PALS_PID_GAINS, "ff-pid-non": FF_PID_NON_GAINS})

    def to_dict(self) -> dict:
        return {"vehicle": self.vehicle.to_dict(),
                "gains": {k: g.to_dict() for k, g in self.gains.items()}}


def default_config_path():
    return resources.files("palsim") / "data" / "default.yaml"


def load_config(path: str | Path | None = None) -> Config:
    """Read a YAML config; missing fields fall back to the shipped defaults."""
    base = yaml.safe_load(default_config_path().read_text())
    if path is not None:
        user = yaml.safe_load(Path(path).read_text()) or {}
        extra = set(user) - {"vehicle", "gains"}
        if extra:
            raise ConfigError(f"unknown config section(s): {sorted(extra)}")
        base["vehicle"].update(user.get("vehicle") or {})
        base["gains"].update(user.get("gains") or {})
    vehicle = VehicleParams.from_dict(base["vehicle"])
    gains = {name: PidGains.from_dict(block) for name, block in base["gains"].items()}
    return Config(vehicle=vehicle, gains=gains)


def save_config(config: Config, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(config.to_dict(), sort_keys=False))
