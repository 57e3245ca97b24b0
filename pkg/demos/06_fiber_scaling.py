"""Scaling a submersion metric along its fibers
================================================

Pointwise sectional data of a submersion with totally geodesic fibers
determines the deformed scalar curvature as a rational function of the fiber
scale s, with a 1/s term from the fiber: a positively curved fiber always
wins for small s, and the positivity threshold is the first root.
"""

import numpy as np

from curvlab import SubmersionPointData, cv_scal, cv_sectional, positivity_threshold

# A product of a hyperbolic-type base (scal -4) with a round 2-sphere fiber
# (scal 2): cv_scal(s) = -4 + 2/s, positive exactly below s = 1/2.
pair = -4.0 / 2.0
K = np.array([[0.0, pair], [pair, 0.0]])
data = SubmersionPointData(base_dim=2, fiber_dim=2, K_base=K, K_tot_hh=K.copy(),
                           K_mixed=np.zeros((2, 2)), fiber_scal=2.0)

print(f"{'s':>8s} {'scal':>10s} {'hh pair':>10s} {'vv pair':>10s}")
for s in (0.05, 0.25, 0.5, 1.0, 2.0):
    print(f"{s:8.2f} {cv_scal(data, s):10.4f} "
          f"{cv_sectional(data, s, 'hh', 0, 1):10.4f} "
          f"{cv_sectional(data, s, 'vv', fiber_k=1.0):10.4f}")

print("\npositivity threshold:", positivity_threshold(data), "(analytic 0.5)")

# With a flat base nothing opposes the fiber term and the threshold is
# unbounded.
flat = SubmersionPointData(base_dim=2, fiber_dim=2, K_base=np.zeros((2, 2)),
                           K_tot_hh=np.zeros((2, 2)), K_mixed=np.zeros((2, 2)),
                           fiber_scal=2.0)
print("flat base threshold :", positivity_threshold(flat))
