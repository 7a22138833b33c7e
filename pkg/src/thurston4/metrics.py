"""Invariant metrics, left-invariant frames and orthonormal frames.

Matrices are indexed in the coordinate order ``(t, x, y, z)``.  A frame is a
4x4 matrix whose column ``i`` holds the coordinate components of the i-th
vector field.  Everything broadcasts over leading axes of the point array.
"""
from __future__ import annotations

import math

import numpy as np

from .groups import Geometry, GeometrySpec, ParameterError, check_point


def validate_params(spec: GeometrySpec) -> None:
    """Raise :class:`ParameterError` naming the first violated constraint."""
    values = {k: v for k, v in spec.params().items() if v is not None}
    for name, value in values.items():
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value}")
    if not spec.scale > 0:
        raise ParameterError(f"scale must be > 0, got {spec.scale}")

    kind = spec.kind
    if kind is Geometry.SOL4MN:
        if spec.m is None or spec.n is None:
            raise ParameterError("sol4mn requires both m and n")
        if not (spec.m > 0 and spec.n > 0):
            raise ParameterError(f"m and n must be > 0, got m={spec.m}, n={spec.n}")
    elif kind is Geometry.SOL41:
        for name in ("tau1", "tau2"):
            if not getattr(spec, name) > 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(spec, name)}")
    elif kind is Geometry.NIL4:
        for name in ("tau1", "tau2", "tau3"):
            if not getattr(spec, name) > 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(spec, name)}")
        if not spec.tau3 - spec.alpha**2 > 0:
            raise ParameterError(
                f"nil4 needs alpha^2 < tau3 (got alpha={spec.alpha}, tau3={spec.tau3}); "
                "otherwise the metric is not positive definite"
            )


def metric_at(spec: GeometrySpec, p) -> np.ndarray:
    """Metric matrix ``g_ij(p)`` in the coordinate basis."""
    p = check_point(spec, p)
    t, x, y, z = np.moveaxis(p, -1, 0)
    g = np.zeros(t.shape + (4, 4), dtype=p.dtype)
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        g[..., 0, 0] = 1.0
        g[..., 1, 1] = np.exp(-2 * a * t)
        g[..., 2, 2] = np.exp(-2 * b * t)
        g[..., 3, 3] = np.exp(-2 * c * t)
    elif kind is Geometry.SOL41:
        tau1, tau2 = spec.tau1, spec.tau2
        g[..., 0, 0] = (x * x + tau1) / (t * t)
        g[..., 1, 1] = 1.0
        g[..., 2, 2] = (1 + tau2 * x * x) / (t * t)
        g[..., 3, 3] = tau2
        g[..., 0, 1] = g[..., 1, 0] = -x / t
        g[..., 2, 3] = g[..., 3, 2] = -tau2 * x / t
    else:
        tau1, tau2, tau3, alpha = spec.tau1, spec.tau2, spec.tau3, spec.alpha
        t2 = t * t
        g[..., 0, 0] = tau1
        g[..., 1, 1] = 1.0
        g[..., 2, 2] = t2 + tau2
        g[..., 3, 3] = t2 * t2 / 4 + t2 * (alpha + tau2) + tau3
        g[..., 1, 2] = g[..., 2, 1] = -t
        g[..., 1, 3] = g[..., 3, 1] = (t2 + 2 * alpha) / 2
        g[..., 2, 3] = g[..., 3, 2] = -(t2 * t + 2 * t * (alpha + tau2)) / 2
    return spec.scale * g


def inverse_metric_at(spec: GeometrySpec, p) -> np.ndarray:
    # g^-1 = F F^T for an orthonormal frame F; exact and cheap
    f = orthonormal_frame_at(spec, p)
    return f @ np.swapaxes(f, -1, -2)


def frame_at(spec: GeometrySpec, p) -> np.ndarray:
    """Left-invariant frame ``E_1..E_4`` at ``p``."""
    return _frame(spec, check_point(spec, p))


def _frame(spec, p):
    t, x = p[..., 0], p[..., 1]
    f = np.zeros(t.shape + (4, 4))
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        f[..., 0, 0] = 1.0
        f[..., 1, 1] = np.exp(a * t)
        f[..., 2, 2] = np.exp(b * t)
        f[..., 3, 3] = np.exp(c * t)
    elif kind is Geometry.SOL41:
        # E1 = t dt + x dx, E2 = dx, E3 = t dy + x dz, E4 = dz
        f[..., 0, 0] = t
        f[..., 1, 0] = x
        f[..., 1, 1] = 1.0
        f[..., 2, 2] = t
        f[..., 3, 2] = x
        f[..., 3, 3] = 1.0
    else:
        # E1 = dt, E2 = dx, E3 = t dx + dy, E4 = t^2/2 dx + t dy + dz
        f[..., 0, 0] = 1.0
        f[..., 1, 1] = 1.0
        f[..., 1, 2] = t
        f[..., 2, 2] = 1.0
        f[..., 1, 3] = t * t / 2
        f[..., 2, 3] = t
        f[..., 3, 3] = 1.0
    return f


def coframe_at(spec: GeometrySpec, p) -> np.ndarray:
    """Inverse of :func:`frame_at`; row ``i`` is the 1-form dual to ``E_i``."""
    return _coframe(spec, check_point(spec, p))


def _coframe(spec, p):
    t, x = p[..., 0], p[..., 1]
    th = np.zeros(t.shape + (4, 4))
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        th[..., 0, 0] = 1.0
        th[..., 1, 1] = np.exp(-a * t)
        th[..., 2, 2] = np.exp(-b * t)
        th[..., 3, 3] = np.exp(-c * t)
    elif kind is Geometry.SOL41:
        th[..., 0, 0] = 1 / t
        th[..., 1, 0] = -x / t
        th[..., 1, 1] = 1.0
        th[..., 2, 2] = 1 / t
        th[..., 3, 2] = -x / t
        th[..., 3, 3] = 1.0
    else:
        # dt, dx - t dy + t^2/2 dz, dy - t dz, dz
        th[..., 0, 0] = 1.0
        th[..., 1, 1] = 1.0
        th[..., 1, 2] = -t
        th[..., 1, 3] = t * t / 2
        th[..., 2, 2] = 1.0
        th[..., 2, 3] = -t
        th[..., 3, 3] = 1.0
    return th


def orthonormal_coframe_at(spec: GeometrySpec, p) -> np.ndarray:
    return np.linalg.inv(orthonormal_coefficients(spec)) @ coframe_at(spec, p)


def frame_derivative(spec: GeometrySpec, p, direction) -> np.ndarray:
    """Directional derivative of :func:`frame_at` along ``direction``."""
    p = check_point(spec, p)
    d = np.asarray(direction, dtype=float)
    return _frame_derivative(spec, *np.broadcast_arrays(p, d))


def _frame_derivative(spec, p, d):
    t = p[..., 0]
    dt, dx = d[..., 0], d[..., 1]
    out = np.zeros(t.shape + (4, 4))
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        a, b, c = spec.diagonal_rates
        out[..., 1, 1] = a * np.exp(a * t) * dt
        out[..., 2, 2] = b * np.exp(b * t) * dt
        out[..., 3, 3] = c * np.exp(c * t) * dt
    elif kind is Geometry.SOL41:
        out[..., 0, 0] = dt
        out[..., 1, 0] = dx
        out[..., 2, 2] = dt
        out[..., 3, 2] = dx
    else:
        out[..., 1, 2] = dt
        out[..., 1, 3] = t * dt
        out[..., 2, 3] = dt
    return out


def orthonormal_coefficients(spec: GeometrySpec) -> np.ndarray:
    """Constant matrix ``A`` with ``orthonormal_frame = frame_at @ A``."""
    a = np.eye(4)
    if spec.kind is Geometry.SOL41:
        a[0, 0] = 1 / math.sqrt(spec.tau1)
        a[3, 3] = 1 / math.sqrt(spec.tau2)
    elif spec.kind is Geometry.NIL4:
        a[0, 0] = 1 / math.sqrt(spec.tau1)
        a[2, 2] = 1 / math.sqrt(spec.tau2)
        s = math.sqrt(spec.tau3 - spec.alpha**2)
        a[:, 3] = [0.0, -spec.alpha / s, 0.0, 1 / s]
    return a / math.sqrt(spec.scale)


def orthonormal_frame_at(spec: GeometrySpec, p) -> np.ndarray:
    return frame_at(spec, p) @ orthonormal_coefficients(spec)


def gram(spec: GeometrySpec, p, fields) -> np.ndarray:
    """``G_ij = g(f_i, f_j)`` for the columns of ``fields``."""
    g = metric_at(spec, p)
    f = np.asarray(fields, dtype=float)
    return np.swapaxes(f, -1, -2) @ g @ f


def inner(spec: GeometrySpec, p, u, v) -> np.ndarray:
    g = metric_at(spec, p)
    return np.einsum("...i,...ij,...j->...", u, g, v)


def random_params(kind, rng: np.random.Generator) -> dict:
    """Draw a random admissible parameter assignment for ``kind``."""
    from .roots import RootKind, solve_roots

    kind = Geometry(kind)
    scale = float(rng.uniform(0.5, 2.0))
    if kind is Geometry.SOL40:
        return {"scale": scale}
    if kind is Geometry.SOL4MN:
        while True:
            m, n = rng.uniform(3.5, 10.0, size=2)
            if abs(m - n) > 0.1 and solve_roots(m, n).kind is RootKind.THREE_DISTINCT:
                return {"m": float(m), "n": float(n), "scale": scale}
    if kind is Geometry.SOL41:
        tau1, tau2 = rng.uniform(0.25, 4.0, size=2)
        return {"tau1": float(tau1), "tau2": float(tau2), "scale": scale}
    tau1, tau2, tau3 = rng.uniform(0.25, 4.0, size=3)
    alpha = float(rng.uniform(-0.9, 0.9) * math.sqrt(tau3))
    return {"tau1": float(tau1), "tau2": float(tau2), "tau3": float(tau3), "alpha": alpha, "scale": scale}
