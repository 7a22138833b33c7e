"""Which frame-constant almost complex structures give a closed Kähler form?

For each geometry we scan the twelve signed pairings J of the orthonormal
frame and report |d omega| for omega = e^{2kt} g(J., .), k = 0 and 1.

Sol4_0 has a pairing whose conformally rescaled form is closed.  On Nil4 the
pairing (e1 e2)(e3 e4) already gives a closed form: that J is compatible and
symplectic but not integrable, as the Nijenhuis tensor below shows.
"""
import numpy as np

from thurston4 import kahler_scan, make_spec
from thurston4.curvature import frame_brackets

for spec in (make_spec("sol40"), make_spec("sol4mn", m=5, n=6), make_spec("sol41", tau1=2.0, tau2=3.0), make_spec("nil4")):
    report = kahler_scan(spec, points=50, seed=0)
    print(f"\n== {spec.kind.value}")
    for e in report.entries[::4]:
        r = e["residuals"]
        print(f"  {e['label']:<24} k=0: {r['exponent_0']:.1e}   k=1: {r['exponent_1']:.1e}")


def nijenhuis(spec, j):
    c = frame_brackets(spec)

    def br(x, y):
        return np.einsum("cab,a,b->c", c, x, y)

    basis = np.eye(4)
    return max(
        np.max(np.abs(br(j @ x, j @ y) - j @ br(j @ x, y) - j @ br(x, j @ y) - br(x, y)))
        for x in basis
        for y in basis
    )


nil = make_spec("nil4")
best = kahler_scan(nil, points=20).best(0.0)
print(f"\nnil4 closed candidate {best['label']}: |N_J| = {nijenhuis(nil, np.array(best['matrix'])):.2f}")
sol = make_spec("sol40")
best = kahler_scan(sol, points=20).best(1.0)
print(f"sol40 closed candidate {best['label']}: |N_J| = {nijenhuis(sol, np.array(best['matrix'])):.2f}")
