"""Telemetry container, CSV round-trip and run metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CORNERS = ("FL", "FR", "RL", "RR")
LIFT_EPSILON = 1.0        # N
ROLLOVER_ANGLE = 0.7      # rad
SETTLING_BAND = 0.05

STATE_COLUMNS = [
    ("x", "m"), ("y", "m"), ("z", "m"),
    ("roll", "rad"), ("pitch", "rad"), ("yaw", "rad"),
    ("vx", "m/s"), ("vy", "m/s"), ("vz", "m/s"),
    ("roll_rate", "rad/s"), ("pitch_rate", "rad/s"), ("yaw_rate", "rad/s"),
] + [(f"zu_{c}", "m") for c in CORNERS] + [(f"wu_{c}", "m/s") for c in CORNERS]

CORNER_SERIES = [
    ("tire_fz", "N"), ("tire_fy", "N"), ("tire_fx", "N"), ("susp_force", "N"),
    ("act_force", "N"), ("torque_ref", "N m"), ("torque", "N m"),
    ("torque_ff", "N m"), ("torque_pid", "N m"),
]
SCALAR_SERIES = [("ax", "m/s^2"), ("ay", "m/s^2"), ("steer", "rad"), ("ax_cmd", "m/s^2")]


class WindowMismatch(ValueError):
    """Runs compared on different time bases."""


@dataclass
class Telemetry:
    """Time-indexed record of one run.

    Corner series are (n, 4) arrays in FL, FR, RL, RR order.
    """

    time: np.ndarray
    state: np.ndarray
    tire_fz: np.ndarray
    tire_fy: np.ndarray
    tire_fx: np.ndarray
    susp_force: np.ndarray
    act_force: np.ndarray
    torque_ref: np.ndarray
    torque: np.ndarray
    torque_ff: np.ndarray
    torque_pid: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    steer: np.ndarray
    ax_cmd: np.ndarray
    metadata: dict = field(default_factory=dict)

    @classmethod
    def allocate(cls, n: int, metadata: dict | None = None) -> "Telemetry":
        corner = {name: np.zeros((n, 4)) for name, _ in CORNER_SERIES}
        scalar = {name: np.zeros(n) for name, _ in SCALAR_SERIES}
        return cls(time=np.zeros(n), state=np.zeros((n, len(STATE_COLUMNS))),
                   metadata=dict(metadata or {}), **corner, **scalar)

    def truncate(self, n: int) -> "Telemetry":
        kwargs = {name: getattr(self, name)[:n] for name in self._array_names()}
        return Telemetry(metadata=self.metadata, **kwargs)

    @staticmethod
    def _array_names():
        return (["time", "state"] + [n for n, _ in CORNER_SERIES] + [n for n, _ in SCALAR_SERIES])

    def __len__(self):
        return len(self.time)

    @property
    def roll(self):
        return self.state[:, 3]

    @property
    def pitch(self):
        return self.state[:, 4]

    @property
    def yaw(self):
        return self.state[:, 5]

    @property
    def vx(self):
        return self.state[:, 6]

    @property
    def roll_rate(self):
        return self.state[:, 9]

    def window(self, start: float = -np.inf, end: float = np.inf) -> np.ndarray:
        return (self.time >= start) & (self.time <= end)

    # --- CSV -----------------------------------------------------------------

    def columns(self) -> list[str]:
        cols = ["time [s]"] + [f"{n} [{u}]" for n, u in STATE_COLUMNS]
        for name, unit in CORNER_SERIES:
            cols += [f"{name}_{c} [{unit}]" for c in CORNERS]
        cols += [f"{n} [{u}]" for n, u in SCALAR_SERIES]
        return cols

    def as_table(self) -> np.ndarray:
        parts = [self.time[:, None], self.state]
        parts += [getattr(self, name) for name, _ in CORNER_SERIES]
        parts += [getattr(self, name)[:, None] for name, _ in SCALAR_SERIES]
        return np.hstack(parts)

    def to_csv(self, path: str | Path, precision: int = 9) -> None:
        """Write a CSV with a ``#``-prefixed JSON metadata line.

        Values are printed with ``precision`` significant digits; 17 makes
        the round trip bit-exact for float64.
        """
        with open(path, "w") as fh:
            fh.write("# " + json.dumps(self.metadata, sort_keys=True, default=_json_default) + "\n")
            fh.write(",".join(self.columns()) + "\n")
            np.savetxt(fh, self.as_table(), delimiter=",", fmt=f"%.{precision}g")

    @classmethod
    def from_csv(cls, path: str | Path) -> "Telemetry":
        with open(path) as fh:
            first = fh.readline()
            meta = json.loads(first[1:]) if first.startswith("#") else {}
        table = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
        n_state = len(STATE_COLUMNS)
        col = 0
        kwargs = {"time": table[:, 0]}
        col = 1
        kwargs["state"] = table[:, col:col + n_state]
        col += n_state
        for name, _ in CORNER_SERIES:
            kwargs[name] = table[:, col:col + 4]
            col += 4
        for name, _ in SCALAR_SERIES:
            kwargs[name] = table[:, col]
            col += 1
        return cls(metadata=meta, **kwargs)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


# --- metrics -------------------------------------------------------------------


def rms(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean(x ** 2))) if x.size else 0.0


def settling_time(time, signal, start: float = 0.0, band: float = SETTLING_BAND,
                  tolerance: float | None = None) -> float:
    """Time after ``start`` of the last entry into the settling band.

    The band is ``band`` times the largest excursion from the final value,
    which keeps the definition usable when the final value is near zero.
    An explicit absolute ``tolerance`` overrides it; use one shared value
    when comparing controllers, otherwise a run with a smaller excursion
    gets a tighter band.  Returns 0 when the signal never leaves the band.
    """
    time = np.asarray(time)
    signal = np.asarray(signal)
    mask = time >= start
    t, s = time[mask], signal[mask]
    if t.size == 0:
        return 0.0
    final = s[-1]
    excursion = np.abs(s - final)
    tol = band * excursion.max() if tolerance is None else tolerance
    if tol == 0:
        return 0.0
    outside = np.nonzero(excursion > tol)[0]
    if outside.size == 0:
        return 0.0
    last = outside[-1]
    if last + 1 >= t.size:
        return float(t[-1] - start)
    return float(t[last + 1] - start)


def detect_two_wheel_lift(time, tire_fz, epsilon: float = LIFT_EPSILON) -> list[tuple[str, float, float]]:
    """Intervals where both tires on one side carry at most ``epsilon``.

    Returns ``(side, start, end)`` tuples ordered by start time; an interval
    still open at the end of the record closes at the last sample.
    """
    time = np.asarray(time)
    tire_fz = np.asarray(tire_fz)
    intervals = []
    for side, (a, b) in (("left", (0, 2)), ("right", (1, 3))):
        lifted = (tire_fz[:, a] <= epsilon) & (tire_fz[:, b] <= epsilon)
        edges = np.diff(lifted.astype(int))
        starts = list(np.nonzero(edges == 1)[0] + 1)
        ends = list(np.nonzero(edges == -1)[0] + 1)
        if lifted.size and lifted[0]:
            starts.insert(0, 0)
        for k, s in enumerate(starts):
            e = ends[k] if k < len(ends) else len(time) - 1
            intervals.append((side, float(time[s]), float(time[e])))
    return sorted(intervals, key=lambda iv: iv[1])


def lift_intervals(tel: Telemetry) -> list[tuple[str, float, float]]:
    return detect_two_wheel_lift(tel.time, tel.tire_fz)


def detect_rollover(time, roll, threshold: float = ROLLOVER_ANGLE,
                    diverged: bool = False) -> tuple[bool, float | None]:
    """First time |roll| exceeds ``threshold``; divergence also counts."""
    roll = np.asarray(roll)
    over = np.nonzero(np.abs(roll) > threshold)[0]
    if over.size:
        return True, float(np.asarray(time)[over[0]])
    if diverged:
        return True, float(np.asarray(time)[-1]) if len(time) else 0.0
    return False, None


@dataclass
class RunReport:
    rms_roll: float
    rms_pitch: float
    peak_roll: float
    peak_pitch: float
    settling_time: float
    two_wheel_lift_intervals: list
    rolled_over: bool
    rollover_time: float | None = None
    roll_rms_ratio_vs_passive: float | None = None
    torque_rms: list = field(default_factory=list)
    continuous_torque_exceeded: bool = False

    def to_dict(self) -> dict:
        return dict(vars(self))


def run_report(tel: Telemetry, reference: Telemetry | None = None,
               continuous_limit=None, settle_from: float = 0.0) -> RunReport:
    rolled, t_roll = detect_rollover(tel.time, tel.roll,
                                     diverged=bool(tel.metadata.get("diverged", False)))
    torque_rms = [rms(tel.torque[:, i]) for i in range(4)]
    exceeded = False
    if continuous_limit is not None:
        exceeded = bool(np.any(np.asarray(torque_rms) > np.asarray(continuous_limit)))
    report = RunReport(
        rms_roll=rms(tel.roll), rms_pitch=rms(tel.pitch),
        peak_roll=float(np.max(np.abs(tel.roll))) if len(tel) else 0.0,
        peak_pitch=float(np.max(np.abs(tel.pitch))) if len(tel) else 0.0,
        settling_time=settling_time(tel.time, tel.roll, settle_from),
        two_wheel_lift_intervals=lift_intervals(tel),
        rolled_over=rolled, rollover_time=t_roll,
        torque_rms=torque_rms, continuous_torque_exceeded=exceeded)
    if reference is not None:
        report.roll_rms_ratio_vs_passive = rms_ratio(tel, reference)
    return report


def _check_windows(a: Telemetry, b: Telemetry) -> None:
    if len(a.time) != len(b.time) or not np.array_equal(a.time, b.time):
        raise WindowMismatch("runs do not share a time base")


def rms_ratio(active: Telemetry, passive: Telemetry, signal: str = "roll") -> float:
    """RMS of ``signal`` in ``active`` over the RMS in ``passive``."""
    _check_windows(active, passive)
    denominator = rms(getattr(passive, signal))
    if denominator == 0:
        raise ZeroDivisionError("reference RMS is zero")
    return rms(getattr(active, signal)) / denominator


def rms_ratio_report(runs: dict[str, Telemetry], reference: Telemetry,
                     continuous_limit=None) -> dict[str, RunReport]:
    """Reports for every run, each carrying its roll-RMS ratio to ``reference``."""
    for tel in runs.values():
        _check_windows(tel, reference)
    return {name: run_report(tel, reference, continuous_limit) for name, tel in runs.items()}
