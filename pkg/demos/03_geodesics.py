"""Geodesics: conservation, convergence and distances.

Integrates a unit-speed Nil4 geodesic, shows the fourth-order behaviour of
the fixed-step integrator, and measures a few distances by shooting.
"""
import numpy as np

from thurston4 import distance_shooting, integrate_geodesic, make_spec
from thurston4.isometries import left_translation
from thurston4.metrics import inner

spec = make_spec("nil4", tau1=1.5, alpha=0.3)
p = np.array([0.2, -0.4, 0.1, 0.3])
v = np.array([0.5, 1.0, -0.3, 0.2])
v /= np.sqrt(inner(spec, p, v, v))

traj = integrate_geodesic(spec, p, v, T=10.0, dt=1e-3)
print(f"endpoint after s = 10: {traj.endpoint}")
print(f"max energy drift: {traj.max_energy_drift:.1e}")

ref = integrate_geodesic(spec, p, v, 1.5, 1e-4).endpoint
errors = [np.linalg.norm(integrate_geodesic(spec, p, v, 1.5, dt).endpoint - ref) for dt in (0.2, 0.1, 0.05)]
print("endpoint error for dt = 0.2, 0.1, 0.05:", ["%.2e" % e for e in errors])
print("ratios under halving:", [round(a / b, 2) for a, b in zip(errors, errors[1:])])

q = traj.positions[500]  # s = 0.5 along the same geodesic
res = distance_shooting(spec, p, q)
print(f"\nshooting p -> gamma(0.5): length {res.length:.10f}, converged {res.converged}, error {res.error:.1e}")

g = np.array([1.0, 2.0, -1.0, 0.5])
phi = left_translation(spec, g)
moved = distance_shooting(spec, phi(p), phi(q))
print(f"after a left translation:     length {moved.length:.10f}")
