"""Step steer with all three configurations.

Run from the package root; writes step_attitude.svg to the working
directory and prints the roll RMS of each run relative to the passive car.
"""

from palsim import CONTROLLER_NAMES, StepSteer, VehicleParams, make_controller, rms_ratio, simulate
from palsim.plots import attitude_plot

params = VehicleParams()
runs = {name: simulate(StepSteer(), make_controller(name, params), params)
        for name in CONTROLLER_NAMES}
for name, tel in runs.items():
    print(f"{name:12s} roll RMS ratio {rms_ratio(tel, runs['passive']):.3f}")
print("plot:", attitude_plot(runs, "step_attitude.svg", "step steer"))
