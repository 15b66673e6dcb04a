"""Fishhook over the standard entrance speeds.

Shows which configurations roll over and where the feedforward car only
lifts two wheels for a moment.
"""

from palsim import (CONTROLLER_NAMES, FISHHOOK_MES, VehicleParams, detect_two_wheel_lift,
                    fishhook_delta_ini, make_controller, rolled_over, run_fishhook)

params = VehicleParams()
delta_ini = fishhook_delta_ini(params)
print(f"initial wheel angle {delta_ini:.2f} deg")
for mes in FISHHOOK_MES:
    cells = []
    for name in CONTROLLER_NAMES:
        tel = run_fishhook(params, make_controller(name, params), mes, delta_ini)
        lifts = detect_two_wheel_lift(tel.time, tel.tire_fz)
        state = "ROLLOVER" if rolled_over(tel) else f"ok, {len(lifts)} lift(s)"
        cells.append(f"{name} {state}")
    print(f"{mes:g} mph: " + "; ".join(cells))
