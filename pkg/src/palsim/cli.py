"""Command line entry point: ``palsim fit|run|compare|sweep-mes|sweep-freq``.

Exit codes: 0 success, 1 bad arguments or configuration, 2 rollover seen
with ``--fail-on-rollover``, 3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import plots
from .compensation import CompensationCoefficients
from .controllers import CONTROLLER_NAMES, make_controller
from .fitting import CalibrationAborted, calibrate, default_coefficients, samples_table
from .maneuvers import (FISHHOOK_MES, MANEUVERS, SINUSOID_FREQUENCIES, BrakeInTurn,
                        LongitudinalAccelBrake, SinusoidSteer, SteadyCornering, StepSteer)
from .metrics import rms, run_report
from .params import ConfigError, load_config
from .simulation import fishhook_delta_ini, run_fishhook, simulate

EXIT_OK, EXIT_USAGE, EXIT_ROLLOVER, EXIT_DIVERGED = 0, 1, 2, 3

log = logging.getLogger("palsim")


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 free for rollovers
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML file overriding the default parameters")
    p.add_argument("--out", type=Path, default=Path("palsim_out"), help="output directory")
    p.add_argument("--coefficients", type=Path,
                   help="coefficient file for ff-pid-non (default: shipped fit)")
    p.add_argument("--decimation", type=int, default=10, help="keep every n-th step")
    p.add_argument("--precision", type=int, default=9, help="significant digits in CSV")
    p.add_argument("--dt", type=float, default=1e-3, help="integration step [s]")
    p.add_argument("--fail-on-rollover", action="store_true",
                   help="exit with code 2 when any run rolls over")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")


def _maneuver_args(p: argparse.ArgumentParser, multi: bool = False) -> None:
    p.add_argument("--maneuver", choices=sorted(MANEUVERS), default="step-steer")
    p.add_argument("--scale", type=float, default=0.1, help="steady-cornering time scale")
    p.add_argument("--amp", type=float, default=30.0, help="sinusoid wheel amplitude [deg]")
    if not multi:
        p.add_argument("--mes", type=float, default=40.0, help="fishhook entrance speed [mph]")
        p.add_argument("--freq", type=float, default=0.2, help="sinusoid frequency [Hz]")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="palsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="calibrate the feedforward coefficients on the passive plant")
    _common(p)
    p.add_argument("--scale", type=float, default=0.1)

    p = sub.add_parser("run", help="one maneuver with one controller")
    _common(p)
    _maneuver_args(p)
    p.add_argument("--controller", choices=CONTROLLER_NAMES, default="passive")

    p = sub.add_parser("compare", help="one maneuver with all controllers")
    _common(p)
    _maneuver_args(p)

    p = sub.add_parser("sweep-mes", help="fishhook over several entrance speeds")
    _common(p)
    p.add_argument("--mes", type=float, nargs="+", default=list(FISHHOOK_MES))

    p = sub.add_parser("sweep-freq", help="sinusoidal steer over several frequencies")
    _common(p)
    p.add_argument("--freq", type=float, nargs="+", default=list(SINUSOID_FREQUENCIES))
    p.add_argument("--amp", type=float, default=30.0)
    return parser


class _Session:
    """Resolved configuration shared by the runs of one command."""

    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config)
        self.params = self.config.vehicle
        if getattr(args, "coefficients", None):
            self.coeffs = CompensationCoefficients.load(args.coefficients)
        else:
            self.coeffs = default_coefficients()
        self._delta_ini = None
        self.diverged = False
        self.rolled = False
        args.out.mkdir(parents=True, exist_ok=True)

    @property
    def delta_ini(self) -> float:
        if self._delta_ini is None:
            self._delta_ini = fishhook_delta_ini(self.params, dt=self.args.dt)
        return self._delta_ini

    def controller(self, name):
        return make_controller(name, self.params, self.config.gains, self.coeffs)

    def run(self, maneuver: str, controller: str, mes=None, freq=None, tag=None):
        a = self.args
        ctrl = self.controller(controller)
        if maneuver == "fishhook":
            tel = run_fishhook(self.params, ctrl, mes, self.delta_ini, dt=a.dt,
                               decimation=a.decimation)
        else:
            tel = simulate(self._maneuver(maneuver, freq), ctrl, self.params, dt=a.dt,
                           decimation=a.decimation)
        report = run_report(tel, continuous_limit=self.params.continuous_torques)
        self.rolled |= report.rolled_over
        self.diverged |= bool(tel.metadata.get("diverged"))
        tel.metadata["report"] = report.to_dict()
        name = f"{tag or maneuver}_{controller}.csv"
        tel.to_csv(a.out / name, precision=a.precision)
        return tel, report

    def _maneuver(self, name, freq):
        a = self.args
        if name == "step-steer":
            return StepSteer()
        if name == "steady-cornering":
            return SteadyCornering(scale=a.scale)
        if name == "brake-in-turn":
            return BrakeInTurn(wheelbase=self.params.wheelbase)
        if name == "accel-brake":
            return LongitudinalAccelBrake()
        if name == "sinusoid":
            return SinusoidSteer(frequency=freq, amplitude_deg=a.amp)
        raise ValueError(f"unknown maneuver {name!r}")

    def exit_code(self) -> int:
        if self.diverged:
            return EXIT_DIVERGED
        if self.rolled and self.args.fail_on_rollover:
            return EXIT_ROLLOVER
        return EXIT_OK


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.generic,)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def cmd_fit(args) -> int:
    config = load_config(args.config)
    args.out.mkdir(parents=True, exist_ok=True)
    coeffs, lateral, longitudinal = calibrate(config.vehicle, scale=args.scale, dt=args.dt)
    path = args.out / "coefficients.txt"
    coeffs.save(path)
    header = "ax,ay,dFz_FL,dFz_FR,dFz_RL,dFz_RR"
    for name, samples in (("lateral", lateral), ("longitudinal", longitudinal)):
        np.savetxt(args.out / f"samples_{name}.csv", samples_table(samples), delimiter=",",
                   header=header, comments="", fmt=f"%.{args.precision}g")
    print(f"wrote {path}")
    print(path.read_text(), end="")
    return EXIT_OK


def cmd_run(args) -> int:
    s = _Session(args)
    tel, report = s.run(args.maneuver, args.controller, mes=args.mes, freq=args.freq)
    print(json.dumps(report.to_dict(), default=_json_default, indent=2))
    if not args.no_plots:
        plots.attitude_plot({args.controller: tel}, args.out / f"{args.maneuver}_attitude.svg",
                            args.maneuver)
        plots.torque_plot({args.controller: tel}, args.out / f"{args.maneuver}_torque.svg",
                          title=args.maneuver)
    return s.exit_code()


def cmd_compare(args) -> int:
    s = _Session(args)
    runs, reports = {}, {}
    for name in CONTROLLER_NAMES:
        runs[name], reports[name] = s.run(args.maneuver, name, mes=args.mes, freq=args.freq)
    base = runs["passive"]
    summary = {}
    for name, tel in runs.items():
        d = reports[name].to_dict()
        n = min(len(tel), len(base))
        if np.array_equal(tel.time[:n], base.time[:n]) and rms(base.roll[:n]) > 0:
            d["roll_rms_ratio_vs_passive"] = rms(tel.roll[:n]) / rms(base.roll[:n])
        summary[name] = d
        ratio = d.get("roll_rms_ratio_vs_passive")
        print(f"{name:12s} roll RMS {np.degrees(d['rms_roll']):7.3f} deg  "
              f"ratio {ratio if ratio is None else round(ratio, 3)}  "
              f"rolled over {d['rolled_over']}")
    _write_json(args.out / f"{args.maneuver}_compare.json", summary)
    if not args.no_plots:
        plots.attitude_plot(runs, args.out / f"{args.maneuver}_attitude.svg", args.maneuver)
        plots.torque_plot(runs, args.out / f"{args.maneuver}_torque.svg", title=args.maneuver)
    return s.exit_code()


def cmd_sweep_mes(args) -> int:
    s = _Session(args)
    table = {}
    for mes in args.mes:
        row = {}
        for name in CONTROLLER_NAMES:
            tel, rep = s.run("fishhook", name, mes=mes, tag=f"fishhook_{mes:g}mph")
            row[name] = {"rolled_over": rep.rolled_over, "rollover_time": rep.rollover_time,
                         "two_wheel_lift": rep.two_wheel_lift_intervals,
                         "peak_roll_deg": float(np.degrees(rep.peak_roll))}
        table[f"{mes:g}"] = row
        print(f"MES {mes:g} mph: " + ", ".join(
            f"{n} {'ROLLOVER' if r['rolled_over'] else 'ok'}" for n, r in row.items()))
    _write_json(args.out / "sweep_mes.json", {"delta_ini_deg": s.delta_ini, "runs": table})
    return s.exit_code()


def cmd_sweep_freq(args) -> int:
    s = _Session(args)
    ratios = {n: [] for n in CONTROLLER_NAMES if n != "passive"}
    for f in args.freq:
        runs = {n: s.run("sinusoid", n, freq=f, tag=f"sinusoid_{f:g}Hz")[0]
                for n in CONTROLLER_NAMES}
        base = rms(runs["passive"].roll)
        for n in ratios:
            ratios[n].append(rms(runs[n].roll) / base if base > 0 else float("nan"))
        print(f"{f:g} Hz: " + ", ".join(f"{n} {ratios[n][-1]:.3f}" for n in ratios))
    _write_json(args.out / "sweep_freq.json", {"frequencies": args.freq, "ratios": ratios})
    if not args.no_plots:
        plots.ratio_bar_chart(args.freq, ratios, args.out / "sweep_freq_ratios.svg")
    return s.exit_code()


COMMANDS = {"fit": cmd_fit, "run": cmd_run, "compare": cmd_compare,
            "sweep-mes": cmd_sweep_mes, "sweep-freq": cmd_sweep_freq}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"palsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CalibrationAborted as exc:
        print(f"palsim: calibration failed: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
