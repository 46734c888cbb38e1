"""Integrate each solution for one rotation period and compare with the predicted rigid rotation.

Stable configurations return to the rotated start to integrator accuracy.  Unstable ones amplify
the roundoff in their initial data by roughly exp(sigma T), where sigma is the fastest growth rate
of the linearized flow in the rotating frame.  Printing sigma T next to the error shows why.
"""
import math

from fourvortex import census, dynamics

for m in (0.4, -0.2, -0.55):
    print(f"\nm = {m}")
    seen = set()
    for rec in census.family_records(m):
        key = (rec.family, round(rec.lambda_prime, 8))
        if key in seen:
            continue
        seen.add(key)
        T = dynamics.rotation_period(rec.positions.angular_velocity)
        sigma = dynamics.rotating_frame_growth_rate(rec)
        err = dynamics.rigid_rotation_error(rec, T, tol=1e-10, abort_above=1e-3)
        print(f"  {rec.family:<22} T={T:8.3f}  sigma*T={sigma * T:7.2f}  "
              f"error={err:.1e}  amplified roundoff={math.exp(min(sigma * T, 700)) * 1e-16:.1e}")
