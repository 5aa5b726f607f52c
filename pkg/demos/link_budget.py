"""
Link budget and body blockage
=============================

How far a power beacon reaches, how much a wearable harvests on the way
out, and how often the crowd gets in the way.
"""

import numpy as np

from wpcs.wpt import (BlockageGeometry, LinkBudgetParams, blockage_probability,
                      coverage_radius_2d, rx_power_dbm)

p = LinkBudgetParams()

# Ground range of the -20 dBm sensitivity circle for both antenna options
for name, gain in [("omni", 0.0), ("directional", 16.0)]:
    print(f"{name:12s} reach {coverage_radius_2d(p, gain, 1.8):6.2f} m")

# Harvested DC power along the ground, beacon 3 m up and wearable at 1.2 m
d = np.array([1.0, 2.0, 5.0, 10.0, 20.0, 40.0])
d3 = np.hypot(d, 1.8)
for gain in (0.0, 16.0):
    rx = rx_power_dbm(p, gain, d3)
    dc = np.where(rx >= p.sensitivity_dbm, p.efficiency * 10 ** (rx / 10) * 1e-3, 0.0)
    print(f"gain {gain:4.1f} dBi:", " ".join(f"{x * 1e6:8.2f}" for x in dc), "uW")

# Chance that a pedestrian body cuts the ray, for a few crowd densities
for lam in (0.01, 0.0238, 0.1):
    g = BlockageGeometry(blocker_density_per_m2=lam)
    print(f"lambda {lam:6.4f} /m2:", " ".join(f"{x:.3f}" for x in blockage_probability(d, g)))
