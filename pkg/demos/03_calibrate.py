"""Fit the feedforward coefficients on the passive plant.

The lateral sweep slowly tightens a turn at constant speed; the
longitudinal sweep holds a set of constant accelerations.  Writes
coefficients.txt to the working directory.
"""

import time

from palsim import VehicleParams, calibrate

start = time.perf_counter()
coeffs, lateral, longitudinal = calibrate(VehicleParams())
print(f"{len(lateral)} lateral and {len(longitudinal)} longitudinal samples "
      f"in {time.perf_counter() - start:.1f} s")
coeffs.save("coefficients.txt")
print(open("coefficients.txt").read(), end="")
