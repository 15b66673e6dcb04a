"""Roll RMS ratio against steering frequency, saved as a bar chart."""

from palsim import (CONTROLLER_NAMES, SINUSOID_FREQUENCIES, SinusoidSteer, VehicleParams,
                    make_controller, rms_ratio, simulate)
from palsim.plots import ratio_bar_chart

params = VehicleParams()
ratios = {"pals-pid": [], "ff-pid-non": []}
for f in SINUSOID_FREQUENCIES:
    runs = {n: simulate(SinusoidSteer(frequency=f), make_controller(n, params), params)
            for n in CONTROLLER_NAMES}
    for n in ratios:
        ratios[n].append(rms_ratio(runs[n], runs["passive"]))
    print(f"{f:g} Hz  " + "  ".join(f"{n} {ratios[n][-1]:.3f}" for n in ratios))
print("plot:", ratio_bar_chart(SINUSOID_FREQUENCIES, ratios, "sweep_freq.svg"))
