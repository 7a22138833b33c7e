"""The four solvable model groups Sol4_0, Sol4_{m,n}, Sol4_1 and Nil4.

Every geometry is a Lie group, so points and group elements share the
global chart ``(t, x, y, z)``.  Points are plain numpy arrays whose last axis
has length 4; most functions broadcast over leading axes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Geometry(str, enum.Enum):
    SOL40 = "sol40"
    SOL4MN = "sol4mn"
    SOL41 = "sol41"
    NIL4 = "nil4"


class DomainError(ValueError):
    """A point lies outside the chart of its geometry."""


class ParameterError(ValueError):
    """Metric or group parameters violate their admissibility constraints."""


@dataclass(frozen=True)
class GeometrySpec:
    """Which geometry, plus the parameters of its invariant metric.

    ``scale`` is a homothety factor multiplying the whole metric.  For
    ``SOL4MN`` the exponents ``a < b < c`` are derived from ``(m, n)`` at
    construction and cached in ``exponents``.
    """

    kind: Geometry
    m: float | None = None
    n: float | None = None
    tau1: float = 1.0
    tau2: float = 1.0
    tau3: float = 1.0
    alpha: float = 0.0
    scale: float = 1.0
    exponents: tuple[float, float, float] | None = field(default=None, compare=False)

    def __post_init__(self):
        from .metrics import validate_params
        from .roots import RootKind, solve_roots

        object.__setattr__(self, "kind", Geometry(self.kind))
        validate_params(self)
        if self.kind is Geometry.SOL4MN:
            roots = solve_roots(self.m, self.n)
            if roots.kind is not RootKind.THREE_DISTINCT:
                raise ParameterError(f"sol4mn with m={self.m}, n={self.n}: {roots.describe()}")
            object.__setattr__(self, "exponents", roots.exponents)
        elif self.kind is Geometry.SOL40:
            object.__setattr__(self, "exponents", (1.0, 1.0, -2.0))

    @property
    def diagonal_rates(self) -> np.ndarray:
        """Rates ``(a, b, c)`` of the diagonal action for the two diagonal groups."""
        if self.exponents is None:
            raise AttributeError(f"{self.kind.value} is not a diagonal group")
        return np.asarray(self.exponents, dtype=float)

    def params(self) -> dict:
        """Parameter assignments that matter for this geometry."""
        out = {"scale": self.scale}
        if self.kind is Geometry.SOL4MN:
            out.update(m=self.m, n=self.n)
        elif self.kind is Geometry.SOL41:
            out.update(tau1=self.tau1, tau2=self.tau2)
        elif self.kind is Geometry.NIL4:
            out.update(tau1=self.tau1, tau2=self.tau2, tau3=self.tau3, alpha=self.alpha)
        return out


def sol40(scale=1.0) -> GeometrySpec:
    return GeometrySpec(Geometry.SOL40, scale=scale)


def sol4mn(m, n, scale=1.0) -> GeometrySpec:
    return GeometrySpec(Geometry.SOL4MN, m=float(m), n=float(n), scale=scale)


def sol41(tau1=1.0, tau2=1.0, scale=1.0) -> GeometrySpec:
    return GeometrySpec(Geometry.SOL41, tau1=tau1, tau2=tau2, scale=scale)


def nil4(tau1=1.0, tau2=1.0, tau3=1.0, alpha=0.0, scale=1.0) -> GeometrySpec:
    return GeometrySpec(Geometry.NIL4, tau1=tau1, tau2=tau2, tau3=tau3, alpha=alpha, scale=scale)


def make_spec(kind, **params) -> GeometrySpec:
    """Build a spec from a geometry name and keyword parameters."""
    kind = Geometry(kind)
    return GeometrySpec(kind, **params)


def check_point(spec: GeometrySpec, p) -> np.ndarray:
    """Validate chart constraints; complex points (used for complex-step
    differentiation) are checked on their real part."""
    p = np.asarray(p)
    if not np.iscomplexobj(p):
        p = p.astype(float, copy=False)
    if p.shape[-1] != 4:
        raise ValueError(f"points must have 4 coordinates, got shape {p.shape}")
    if spec.kind is Geometry.SOL41 and np.any(p[..., 0].real <= 0):
        raise DomainError("sol41 requires t > 0")
    if not np.all(np.isfinite(p)):
        raise DomainError("non-finite coordinates")
    return p


def identity(spec: GeometrySpec) -> np.ndarray:
    if spec.kind is Geometry.SOL41:
        return np.array([1.0, 0.0, 0.0, 0.0])
    return np.zeros(4)


def theta(t) -> np.ndarray:
    """Unipotent automorphism of R^3 defining the Nil4 semidirect product."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (3, 3))
    out[..., 0, 0] = out[..., 1, 1] = out[..., 2, 2] = 1.0
    out[..., 0, 1] = out[..., 1, 2] = t
    out[..., 0, 2] = 0.5 * t * t
    return out


def multiply(spec: GeometrySpec, g, h) -> np.ndarray:
    g = check_point(spec, g)
    h = check_point(spec, h)
    g, h = np.broadcast_arrays(g, h)
    t, x, y, z = np.moveaxis(g, -1, 0)
    t2, x2, y2, z2 = np.moveaxis(h, -1, 0)
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        return np.stack([t + t2, x + np.exp(a * t) * x2, y + np.exp(b * t) * y2, z + np.exp(c * t) * z2], axis=-1)
    if kind is Geometry.SOL41:
        return np.stack([t * t2, x2 + x * t2, y + t * y2, z + z2 + x * y2], axis=-1)
    # Nil4: (t, v) . (t', v') = (t + t', v + theta(t) v')
    v2 = np.stack([x2, y2, z2], axis=-1)
    rotated = np.einsum("...ij,...j->...i", theta(t), v2)
    return np.concatenate([(t + t2)[..., None], np.stack([x, y, z], axis=-1) + rotated], axis=-1)


def inverse(spec: GeometrySpec, g) -> np.ndarray:
    g = check_point(spec, g)
    t, x, y, z = np.moveaxis(g, -1, 0)
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        return np.stack([-t, -np.exp(-a * t) * x, -np.exp(-b * t) * y, -np.exp(-c * t) * z], axis=-1)
    if kind is Geometry.SOL41:
        # M^-1 for [[1, x, z], [0, t, y], [0, 0, 1]]
        return np.stack([1.0 / t, -x / t, -y / t, x * y / t - z], axis=-1)
    v = np.stack([x, y, z], axis=-1)
    back = -np.einsum("...ij,...j->...i", theta(-t), v)
    return np.concatenate([(-t)[..., None], back], axis=-1)


def to_matrix(spec: GeometrySpec, g) -> np.ndarray:
    """Faithful matrix representation of a group element.

    Sol4_0 and Sol4_{m,n} give 4x4 diagonal-affine matrices, Sol4_1 the 3x3
    upper triangular ``M(t, x, y, z)``, and Nil4 a 5x5 block embedding
    ``[[theta(t), 0, v], [0, 1, t], [0, 0, 1]]``.
    """
    g = check_point(spec, g)
    t, x, y, z = np.moveaxis(g, -1, 0)
    shape = t.shape
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        out = np.zeros(shape + (4, 4))
        out[..., 0, 0] = np.exp(a * t)
        out[..., 1, 1] = np.exp(b * t)
        out[..., 2, 2] = np.exp(c * t)
        out[..., 3, 3] = 1.0
        out[..., 0, 3] = x
        out[..., 1, 3] = y
        out[..., 2, 3] = z
        return out
    if kind is Geometry.SOL41:
        out = np.zeros(shape + (3, 3))
        out[..., 0, 0] = 1.0
        out[..., 0, 1] = x
        out[..., 0, 2] = z
        out[..., 1, 1] = t
        out[..., 1, 2] = y
        out[..., 2, 2] = 1.0
        return out
    out = np.zeros(shape + (5, 5))
    out[..., :3, :3] = theta(t)
    out[..., 0, 4] = x
    out[..., 1, 4] = y
    out[..., 2, 4] = z
    out[..., 3, 3] = 1.0
    out[..., 3, 4] = t
    out[..., 4, 4] = 1.0
    return out


def structure_constants(spec: GeometrySpec) -> np.ndarray:
    """Array ``c[k, i, j]`` with ``[e_i, e_j] = sum_k c[k, i, j] e_k`` (0-based)."""
    c = np.zeros((4, 4, 4))

    def bracket(i, j, k, value):
        c[k, i, j] = value
        c[k, j, i] = -value

    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, cc = spec.diagonal_rates
        bracket(0, 1, 1, a)
        bracket(0, 2, 2, b)
        bracket(0, 3, 3, cc)
    elif kind is Geometry.SOL41:
        bracket(0, 1, 1, -1.0)
        bracket(0, 2, 2, 1.0)
        bracket(1, 2, 3, 1.0)
    else:
        # read off from the fields E1..E4 (see metrics.frame_at)
        bracket(0, 2, 1, 1.0)
        bracket(0, 3, 2, 1.0)
    return c


def jacobi_residual(c: np.ndarray) -> np.ndarray:
    """Cyclic sum ``[[e_i, e_j], e_k] + ...`` as an array indexed ``[l, i, j, k]``."""
    # [[e_i, e_j], e_k] = c[m, i, j] c[l, m, k]
    term = np.einsum("mij,lmk->lijk", c, c)
    return term + np.transpose(term, (0, 2, 3, 1)) + np.transpose(term, (0, 3, 1, 2))


def random_elements(spec: GeometrySpec, rng: np.random.Generator, size, half_width=2.0) -> np.ndarray:
    """Sample group elements with coordinates in ``[-w, w]``.

    For Sol4_1 the first coordinate is ``exp(u)`` with ``u`` in ``[-w, w]``.
    """
    size = (size,) if np.isscalar(size) else tuple(size)
    p = rng.uniform(-half_width, half_width, size=size + (4,))
    if spec.kind is Geometry.SOL41:
        p[..., 0] = np.exp(p[..., 0])
    return p
