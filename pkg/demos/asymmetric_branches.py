"""Trace the four asymmetric branches s23(m) and confirm the interval certificate along the way."""
import numpy as np

from fourvortex import asymmetric as asy

ms = np.concatenate([np.linspace(-0.99, -0.05, 8), np.linspace(0.05, 0.95, 7)])
trace = asy.branch_trace(ms)

print(f"{'m':>6}  " + "  ".join(f"branch {k}" for k in range(1, 5)) + "  certificate")
for m, row in zip(ms, trace):
    cert = asy.p2_certificate(float(m))
    ok = "ok" if set(cert.values()) == {1} else cert
    print(f"{m:>6.2f}  " + "  ".join(f"{v:>8.4f}" for v in row) + f"  {ok}")

# near m = -1 two branches blow up and two settle at 1/2
print("\nat m = -0.9999:", np.round(asy.branch_trace([-0.9999])[0], 4))
# the middle pair touches at m = 0
print("at m = 0:      ", np.round(asy.branch_trace([0.0])[0], 6))

rep = asy.solve_asymmetric(0.4)
print(f"\nm = 0.4: {len(rep.records)} records ({rep.count} with reflections), Jacobian ranks {rep.jacobian_ranks}")
