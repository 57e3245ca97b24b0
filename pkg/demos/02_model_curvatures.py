"""Closed-form curvature of the two model families
===================================================

Warped products dr^2 + f(r)^2 g_F over a circle carry every conformal and
prescription experiment; left-invariant metrics on the 3-sphere group carry
the deformation experiments and provide exact oracles.
"""

import numpy as np

from curvlab import (WarpedProductMetric, get_preset, ricci_warped,
                     scal_left_invariant, scal_warped, sectional_left_invariant,
                     su2_metric)

# The catalogue: a product with round 3-sphere fiber (scal = 6), a flat
# model (scal = 0), and a hyperbolic-fiber model (scal = -2).
for name in ("round-fiber", "flat-torus", "hyperbolic-fiber"):
    metric = get_preset(name)
    print(f"{name:17s} scal = {scal_warped(metric)[0]:+.3f}")

# A bumpy warping produces a genuinely varying curvature profile.
bumpy = WarpedProductMetric.from_profile(64, 2 * np.pi, 3, 6.0,
                                         lambda r: 1.0 + 0.2 * np.sin(r))
scal = scal_warped(bumpy)
print(f"\nbumpy model: scal in [{scal.min():.3f}, {scal.max():.3f}]")
ric_rr, ric_fib = ricci_warped(bumpy)
print("trace identity |Ric_rr + k Ric_fib - scal| =",
      np.max(np.abs(ric_rr + 3 * ric_fib - scal)))

# Left-invariant metrics: the bi-invariant metric has scal = 3/2 and all
# sectional curvatures equal to 1/4 unnormalized on orthonormal pairs.
bi = su2_metric()
print("\nbi-invariant scal  :", scal_left_invariant(bi))
print("sectional e1^e2    :", sectional_left_invariant(bi, np.eye(3)[0], np.eye(3)[1]))

# Squashing one direction (tensor diag(lam, 1, 1)) interpolates from the
# collapsed-fiber limit (scal -> 2) through the round value to negative
# curvature for strong stretching.
print("\nsquashed 3-sphere family: scal(lam) = 2 - lam/2")
for lam in (0.25, 1.0, 2.0, 4.0, 5.0):
    m = su2_metric(np.diag([lam, 1.0, 1.0]))
    print(f"  lam = {lam:4.2f}   scal = {scal_left_invariant(m):+.4f}")
