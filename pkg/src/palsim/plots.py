"""Standalone SVG comparison plots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import Telemetry  # noqa: E402


def attitude_plot(runs: dict[str, Telemetry], path: str | Path, title: str = "") -> Path:
    """Roll and pitch against time, one line per controller."""
    fig, (ax_roll, ax_pitch) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    for name, tel in runs.items():
        ax_roll.plot(tel.time, np.degrees(tel.roll), label=name)
        ax_pitch.plot(tel.time, np.degrees(tel.pitch), label=name)
    ax_roll.set_ylabel("roll [deg]")
    ax_pitch.set_ylabel("pitch [deg]")
    ax_pitch.set_xlabel("time [s]")
    ax_roll.legend()
    ax_roll.set_title(title)
    for a in (ax_roll, ax_pitch):
        a.grid(alpha=0.3)
    return _save(fig, path)


def torque_plot(runs: dict[str, Telemetry], path: str | Path, corner: int = 0,
                title: str = "") -> Path:
    """Actual rocker torque at one corner (0 = front left)."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for name, tel in runs.items():
        ax.plot(tel.time, tel.torque[:, corner], label=name)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("rocker torque [N m]")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)


def ratio_bar_chart(frequencies, ratios: dict[str, list[float]], path: str | Path,
                    title: str = "roll RMS ratio to passive") -> Path:
    """Grouped bars: one group per frequency, one bar per controller."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    x = np.arange(len(frequencies))
    width = 0.8 / max(len(ratios), 1)
    for k, (name, values) in enumerate(ratios.items()):
        ax.bar(x + k * width, values, width, label=name)
    ax.set_xticks(x + width * (len(ratios) - 1) / 2)
    ax.set_xticklabels([f"{f:g} Hz" for f in frequencies])
    ax.set_ylabel("ratio")
    ax.set_title(title)
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
