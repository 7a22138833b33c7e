"""Roots of ``x^3 - m x^2 + n x - 1`` and the resulting Sol4_{m,n} exponents."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

#: two roots closer than this are treated as one double root
DOUBLE_ROOT_GAP = 1e-8


class RootKind(str, enum.Enum):
    THREE_DISTINCT = "three_distinct"
    DOUBLE_ROOT = "double_root"
    PRODUCT_CASE = "product_case"
    INVALID = "invalid"


@dataclass(frozen=True)
class RootClassification:
    """Outcome of :func:`solve_roots`.

    ``roots`` always holds all three roots of the cubic (complex when
    ``kind`` is INVALID), sorted by real part.  ``exponents`` are the logs
    ``(a, b, c)`` and only exist for THREE_DISTINCT.
    """

    kind: RootKind
    m: float
    n: float
    roots: tuple
    exponents: tuple[float, float, float] | None = None

    def describe(self) -> str:
        if self.kind is RootKind.THREE_DISTINCT:
            a, b, c = self.exponents
            return f"three distinct positive roots, exponents a={a!r}, b={b!r}, c={c!r}"
        if self.kind is RootKind.PRODUCT_CASE:
            return "m = n: 1 is a root and the geometry is the product Sol3 x R"
        if self.kind is RootKind.DOUBLE_ROOT:
            return "repeated root: the geometry is identified with Sol4_0"
        return "complex roots: no Sol4_{m,n} geometry for these parameters"


def cubic(x, m, n):
    return ((x - m) * x + n) * x - 1.0


def _cubic_prime(x, m, n):
    return (3.0 * x - 2.0 * m) * x + n


def _noise(x, m, n):
    # rounding scale of the Horner evaluation at x
    x = abs(x)
    return 8.0 * np.finfo(float).eps * (x**3 + m * x * x + n * x + 1.0)


def _bisect(lo, hi, flo, m, n, tol=1e-14):
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fmid = cubic(mid, m, n)
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(x, m, n):
    d = _cubic_prime(x, m, n)
    if d == 0.0:
        return x
    step = cubic(x, m, n) / d
    # near a tangency the Newton step is unreliable; keep the bisection value
    return x - step if abs(step) < 1e-10 * max(1.0, x) else x


def vieta_residuals(m, n, roots) -> np.ndarray:
    """``|r1 r2 r3 - 1|, |sum - m|, |pairwise sum - n|`` for the given roots."""
    r1, r2, r3 = (complex(r) for r in roots)
    return np.array([
        abs(r1 * r2 * r3 - 1.0),
        abs(r1 + r2 + r3 - m),
        abs(r1 * r2 + r1 * r3 + r2 * r3 - n),
    ])


def _real_roots(m, n):
    """Real roots with multiplicity, via sign changes on a log grid that
    also contains the critical points of the cubic."""
    upper = 1.0 + max(m, n, 1.0)
    lower = 1.0 / upper
    critical = []
    disc = m * m - 3.0 * n
    if disc >= 0.0:
        s = np.sqrt(disc)
        critical = [c for c in ((m - s) / 3.0, (m + s) / 3.0) if lower < c < upper]
    nodes = np.unique(np.concatenate([np.geomspace(lower, upper, 64), critical]))
    values = cubic(nodes, m, n)
    zero = np.abs(values) <= _noise(nodes, m, n)
    values = np.where(zero, 0.0, values)

    found = []
    for i, node in enumerate(nodes):
        if zero[i]:
            mult = 2 if any(node == c for c in critical) else 1
            found.extend([float(node)] * mult)
    for i in range(len(nodes) - 1):
        if values[i] * values[i + 1] < 0.0:
            r = _bisect(nodes[i], nodes[i + 1], values[i], m, n)
            found.append(float(_polish(r, m, n)))
    return sorted(found)


def solve_roots(m, n) -> RootClassification:
    """Classify the roots of ``x^3 - m x^2 + n x - 1`` for ``m, n > 0``.

    >>> solve_roots(5, 6).kind
    <RootKind.THREE_DISTINCT: 'three_distinct'>
    """
    m = float(m)
    n = float(n)
    if not (m > 0 and n > 0):
        raise ValueError(f"m and n must be positive, got m={m}, n={n}")

    if m == n:
        # x^3 - m x^2 + m x - 1 = (x - 1)(x^2 - (m - 1) x + 1)
        q = np.roots([1.0, -(m - 1.0), 1.0]).astype(complex)
        roots = sorted([1.0 + 0j, *q], key=lambda r: (r.real, r.imag))
        return RootClassification(RootKind.PRODUCT_CASE, m, n, tuple(_simplify(r) for r in roots))

    real = _real_roots(m, n)
    if len(real) < 3:
        # deflate by the (single) real root; the rest is a conjugate pair
        lam = real[0]
        p = m - lam
        disc = complex(p * p - 4.0 / lam)
        pair = [(p - np.sqrt(disc)) / 2.0, (p + np.sqrt(disc)) / 2.0]
        roots = sorted([complex(lam), *pair], key=lambda r: (r.real, r.imag))
        return RootClassification(RootKind.INVALID, m, n, tuple(roots))

    roots = tuple(real[:3])
    if min(np.diff(roots)) < DOUBLE_ROOT_GAP:
        return RootClassification(RootKind.DOUBLE_ROOT, m, n, roots)
    a, b, c = np.log(roots)
    return RootClassification(RootKind.THREE_DISTINCT, m, n, roots, (float(a), float(b), float(c)))


def _simplify(r: complex):
    return r.real if r.imag == 0 else r
