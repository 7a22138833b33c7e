"""Levi-Civita connection and curvature, computed two independent ways.

The *coordinate route* differentiates the metric matrix numerically
(Richardson-extrapolated central differences) and never looks at frames or
brackets.  The *frame route* applies the Koszul formula to the structure
constants in the orthonormal frame, which gives point-independent
coefficients for these left-invariant metrics.

Convention: ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``
and the lowered tensor is ``R[i, j, k, l] = <R(d_i, d_j) d_k, d_l>``, so the
sectional curvature of span(u, v) is ``R(u, v, v, u) / |u ^ v|^2``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .groups import DomainError, Geometry, GeometrySpec, check_point, structure_constants
from .metrics import metric_at, orthonormal_coefficients, orthonormal_frame_at

DEFAULT_STEP = 1e-4
#: outer step and Richardson depth for differentiating Christoffel symbols
DEFAULT_OUTER_STEP = 3e-3
DEFAULT_OUTER_LEVELS = 3
COMPLEX_STEP = 1e-30


def fd_gradient(fn, p, step, levels=2):
    """Gradient of a batched function by central differences with
    Richardson extrapolation over steps ``h, h/2, ..., h/2**(levels-1)``.

    ``fn`` maps points ``(..., 4)`` to arrays ``(..., *shape)``; the result
    has shape ``(..., 4, *shape)`` with the derivative direction first.
    """
    p = np.asarray(p, dtype=float)
    nb = p.ndim - 1
    step = np.asarray(step, dtype=float)
    steps = step[..., None] / 2.0 ** np.arange(levels)  # (..., levels)
    offsets = np.concatenate([steps, -steps], axis=-1)
    pts = p[..., None, None, :] + offsets[..., :, None, None] * np.eye(4)
    vals = fn(pts)
    table = []
    for i in range(levels):
        h = steps[..., i].reshape(steps.shape[:-1] + (1,) * (vals.ndim - nb - 1))
        table.append((np.take(vals, i, axis=nb) - np.take(vals, i + levels, axis=nb)) / (2 * h))
    for k in range(1, levels):
        factor = 4.0**k
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def complex_step_gradient(fn, p, h=COMPLEX_STEP):
    """Gradient by the complex-step formula ``Im f(p + i h e_k) / h``.

    Exact to rounding for real-analytic ``fn`` that accepts complex points;
    shapes as in :func:`fd_gradient`.
    """
    p = np.asarray(p, dtype=float)
    return np.imag(fn(p[..., None, :] + 1j * h * np.eye(4))) / h


def _metric_fn(spec, metric):
    if metric is not None:
        return metric
    return lambda q: metric_at(spec, q)


def _check_neighbourhood(spec, p, step):
    p = check_point(spec, p)
    if spec.kind is Geometry.SOL41 and np.any(p[..., 0] - step <= 0):
        raise DomainError(f"difference step {step} leaves the sol41 chart (t must stay > 0)")
    return p


def christoffel_fd(spec: GeometrySpec, p, step=DEFAULT_STEP, metric=None, method="central") -> np.ndarray:
    """Coordinate Christoffel symbols ``G[k, i, j]`` from differenced metric values.

    ``method`` is ``"central"`` (Richardson-extrapolated central differences
    with ``step``) or ``"complex"`` (complex step; needs a metric that
    accepts complex points).  ``metric`` optionally replaces the configured
    metric by any batched callable ``p -> g(p)``.
    """
    fn = _metric_fn(spec, metric)
    if method == "central":
        p = _check_neighbourhood(spec, p, step)
        dg = fd_gradient(fn, p, step)
    elif method == "complex":
        p = check_point(spec, p)
        dg = complex_step_gradient(fn, p)
    else:
        raise ValueError(f"unknown method {method!r}")
    g = np.real(fn(p))
    # dg[..., a, b, c] = d_a g_bc
    dg = 0.5 * (dg + np.swapaxes(dg, -1, -2))
    lower = dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1)  # [i, j, l]
    gamma = 0.5 * np.einsum("...kl,...ijl->...kij", np.linalg.inv(g), lower)
    return 0.5 * (gamma + np.swapaxes(gamma, -1, -2))


@functools.lru_cache(maxsize=64)
def _frame_data(spec: GeometrySpec):
    a = orthonormal_coefficients(spec)
    a_inv = np.linalg.inv(a)
    c = structure_constants(spec)
    # brackets of the orthonormal frame: [f_a, f_b] = C[c, a, b] f_c
    big_c = np.einsum("ck,kij,ia,jb->cab", a_inv, c, a, a)
    # <nabla_{f_a} f_b, f_c> = (C[c,a,b] - C[a,b,c] + C[b,c,a]) / 2
    gamma = 0.5 * (big_c - np.transpose(big_c, (2, 0, 1)) + np.transpose(big_c, (1, 2, 0)))
    up = (
        np.einsum("dbc,ead->eabc", gamma, gamma)
        - np.einsum("dac,ebd->eabc", gamma, gamma)
        - np.einsum("dab,edc->eabc", big_c, gamma)
    )
    riemann = np.transpose(up, (1, 2, 3, 0))  # R[a, b, c, e] = <R(f_a, f_b) f_c, f_e>
    for arr in (big_c, gamma, riemann):
        arr.setflags(write=False)
    return big_c, gamma, riemann


def frame_brackets(spec: GeometrySpec) -> np.ndarray:
    """Structure constants ``C[c, a, b]`` of the orthonormal frame."""
    return _frame_data(spec)[0]


def christoffel_frame(spec: GeometrySpec) -> np.ndarray:
    """Constant connection coefficients ``G[c, a, b] = <nabla_{f_a} f_b, f_c>``
    in the orthonormal frame."""
    return _frame_data(spec)[1]


def riemann_frame_components(spec: GeometrySpec) -> np.ndarray:
    """Constant lowered curvature tensor in the orthonormal frame."""
    return _frame_data(spec)[2]


@dataclass(frozen=True)
class CurvatureTensor:
    """Lowered Riemann tensor in coordinates at a point, with the inverse
    metric needed for contractions."""

    riemann: np.ndarray
    inverse_metric: np.ndarray
    route: str

    @property
    def ricci(self) -> np.ndarray:
        ric = np.einsum("...il,...ijkl->...jk", self.inverse_metric, self.riemann)
        return 0.5 * (ric + np.swapaxes(ric, -1, -2))

    @property
    def scalar(self) -> np.ndarray:
        return np.einsum("...jk,...jk->...", self.inverse_metric, self.ricci)

    def in_frame(self, frame) -> np.ndarray:
        """Components with respect to the columns of ``frame``."""
        return np.einsum("...ia,...jb,...kc,...ld,...ijkl->...abcd", frame, frame, frame, frame, self.riemann)


def riemann_fd(
    spec: GeometrySpec,
    p,
    outer_step=DEFAULT_OUTER_STEP,
    levels=DEFAULT_OUTER_LEVELS,
    inner="complex",
    step=DEFAULT_STEP,
    metric=None,
) -> CurvatureTensor:
    """Coordinate route: central differences of the Christoffel symbols.

    The Christoffel symbols themselves come from :func:`christoffel_fd` with
    ``method=inner``.  Nesting two real central differences loses about
    half the available digits, hence the complex-step default.
    """
    margin = outer_step + (step if inner == "central" else 0.0)
    p = _check_neighbourhood(spec, p, margin)
    fn = _metric_fn(spec, metric)

    def gamma_fn(q):
        return christoffel_fd(spec, q, step, metric, method=inner)

    gamma = gamma_fn(p)
    dgamma = fd_gradient(gamma_fn, p, outer_step, levels)  # [i, l, j, k] = d_i G^l_jk
    up = (
        np.einsum("...iljk->...lijk", dgamma)
        - np.einsum("...jlik->...lijk", dgamma)
        + np.einsum("...lim,...mjk->...lijk", gamma, gamma)
        - np.einsum("...ljm,...mik->...lijk", gamma, gamma)
    )
    g = np.real(fn(p))
    lowered = np.einsum("...lm,...mijk->...ijkl", g, up)
    return CurvatureTensor(lowered, np.linalg.inv(g), "fd")


def riemann_frame(spec: GeometrySpec, p) -> CurvatureTensor:
    """Frame route: constant Koszul curvature pushed to coordinates at ``p``."""
    f = orthonormal_frame_at(spec, p)
    coframe = np.linalg.inv(f)
    r = np.einsum(
        "...ai,...bj,...ck,...dl,abcd->...ijkl", coframe, coframe, coframe, coframe, riemann_frame_components(spec)
    )
    return CurvatureTensor(r, f @ np.swapaxes(f, -1, -2), "frame")


def riemann_at(spec: GeometrySpec, p, route="frame", **kwargs) -> CurvatureTensor:
    if route == "frame":
        return riemann_frame(spec, p)
    if route == "fd":
        return riemann_fd(spec, p, **kwargs)
    raise ValueError(f"unknown route {route!r}")


def ricci_at(spec: GeometrySpec, p, route="frame", **kwargs) -> np.ndarray:
    return riemann_at(spec, p, route, **kwargs).ricci


def scalar_at(spec: GeometrySpec, p, route="frame", **kwargs) -> np.ndarray:
    return riemann_at(spec, p, route, **kwargs).scalar


def sectional(spec: GeometrySpec, p, u, v, route="frame", curvature: CurvatureTensor | None = None, **kwargs) -> float:
    """Sectional curvature of the plane spanned by ``u`` and ``v`` at ``p``."""
    if curvature is None:
        curvature = riemann_at(spec, p, route, **kwargs)
    g = metric_at(spec, p)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    area2 = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    if area2 <= 1e-14 * (u @ g @ u) * (v @ g @ v):
        raise ValueError("u and v do not span a plane")
    return float(np.einsum("ijkl,i,j,k,l->", curvature.riemann, u, v, v, u) / area2)


def frame_sectionals(spec: GeometrySpec) -> dict[tuple[int, int], float]:
    """Sectional curvatures of the six coordinate planes of the orthonormal
    frame, keyed by 1-based field indices."""
    r = riemann_frame_components(spec)
    return {(a + 1, b + 1): float(r[a, b, b, a]) for a in range(4) for b in range(a + 1, 4)}
