"""Steady-state load transfer and the torque it takes to cancel it.

Prints the per-corner load increment for a few accelerations, then the
rocker torque the feedforward path would command for each.
"""

import numpy as np

from palsim import VehicleParams, force_to_torque, steady_state_increment

params = VehicleParams()
print("ax [m/s2]  ay [m/s2]   dFz FL/FR/RL/RR [N]                    torque [N m]")
for ax, ay in [(-5.0, 0.0), (0.0, 1.0), (0.0, 4.0), (-3.0, 3.0)]:
    inc = steady_state_increment(ax, ay, 20.0, params)
    torque = force_to_torque(inc.per_corner, np.asarray(params.beta_map))
    print(f"{ax:8.1f} {ay:10.1f}   {np.array2string(inc.per_corner, precision=1):38s} "
          f"{np.array2string(torque, precision=1)}")
