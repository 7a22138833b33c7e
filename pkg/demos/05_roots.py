"""The cubic x^3 - m x^2 + n x - 1 behind Sol4_{m,n}.

Only parameters with three distinct positive roots define a geometry; their
logarithms are the exponents of the diagonal action.
"""
from thurston4 import solve_roots
from thurston4.roots import vieta_residuals

for m, n in [(5, 6), (4, 4), (4.25, 5), (6, 11), (7, 13), (9, 8)]:
    res = solve_roots(m, n)
    worst = max(vieta_residuals(m, n, res.roots))
    roots = ", ".join(f"{complex(r).real:.6f}" + (f"{complex(r).imag:+.6f}i" if complex(r).imag else "") for r in res.roots)
    print(f"m={m:<5} n={n:<3} {res.kind.value:<15} roots [{roots}]  vieta {worst:.0e}")
    print(f"    {res.describe()}")
