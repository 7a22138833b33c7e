"""Isometry group actions and the pullback-invariance harness.

Each geometry's group is generated by left translations together with a
finite (or, for Sol4_0, compact one-parameter) set of stabilizer maps.  An
:class:`Isometry` carries its forward map and a closed-form Jacobian; the
harness checks ``J^T g(phi(p)) J == g(p)`` at sampled points.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .groups import Geometry, GeometrySpec, check_point, multiply, random_elements, theta
from .metrics import metric_at

SOL40_ANGLES = (math.pi / 7, 1.0, math.pi / 3, 2.5)
REPORT_VERSION = 1


@dataclass(frozen=True)
class Isometry:
    name: str
    forward: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    origin: str = "stabilizer"
    data: tuple = field(default=(), compare=False)

    def __call__(self, p):
        return self.forward(p)

    def pushforward(self, p, v):
        """``d(phi)_p v`` for tangent vectors ``v`` at ``p``."""
        return np.einsum("...ij,...j->...i", self.jacobian(p), v)


def _linear(name, matrix) -> Isometry:
    matrix = np.asarray(matrix, dtype=float)

    def forward(p):
        return np.einsum("ij,...j->...i", matrix, p)

    def jacobian(p):
        return np.broadcast_to(matrix, np.shape(p)[:-1] + (4, 4))

    return Isometry(name, forward, jacobian)


def _reflection(name, signs) -> Isometry:
    return _linear(name, np.diag(np.asarray(signs, dtype=float)))


def left_translation(spec: GeometrySpec, g) -> Isometry:
    """``h -> g . h`` with its (point-independent) Jacobian."""
    g = check_point(spec, g).copy()
    t, x, y, z = g
    jac = np.eye(4)
    kind = spec.kind
    if kind in (Geometry.SOL40, Geometry.SOL4MN):
        jac[1:, 1:] = np.diag(np.exp(spec.diagonal_rates * t))
    elif kind is Geometry.SOL41:
        # (t, x, y, z) -> (t_g t, x + x_g t, y_g + t_g y, z + z_g + x_g y)
        jac = np.array([[t, 0, 0, 0], [x, 1, 0, 0], [0, 0, t, 0], [0, 0, x, 1]], dtype=float)
    else:
        jac[1:, 1:] = theta(t)

    def forward(p):
        return multiply(spec, g, p)

    def jacobian(p):
        return np.broadcast_to(jac, np.shape(p)[:-1] + (4, 4))

    return Isometry(f"left_translation{tuple(float(c) for c in g)}", forward, jacobian, "left_translation", tuple(g))


def sol40_rotation(angle) -> Isometry:
    c, s = math.cos(angle), math.sin(angle)
    m = np.eye(4)
    m[1:3, 1:3] = [[c, -s], [s, c]]
    return _linear(f"rotate_xy({angle!r})", m)


def _sol41_r_forward(p):
    t, x, y, z = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    return np.stack([1 / t, -y / t, x / t, z - x * y / t], axis=-1)


def _sol41_r_jacobian(p):
    t, x, y, z = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    jac = np.zeros(t.shape + (4, 4))
    t2 = t * t
    jac[..., 0, 0] = -1 / t2
    jac[..., 1, 0] = y / t2
    jac[..., 1, 2] = -1 / t
    jac[..., 2, 0] = -x / t2
    jac[..., 2, 1] = 1 / t
    jac[..., 3, 0] = x * y / t2
    jac[..., 3, 1] = -y / t
    jac[..., 3, 2] = -x / t
    jac[..., 3, 3] = 1.0
    return jac


def stabilizer_generators(spec: GeometrySpec, angles=SOL40_ANGLES) -> list[Isometry]:
    """Generators of the isotropy part of the geometry's group.

    For Sol4_0 the O(2) factor is represented by rotations through
    ``angles`` plus the reflection ``y -> -y``.
    """
    kind = spec.kind
    if kind is Geometry.SOL40:
        gens = [sol40_rotation(a) for a in angles]
        gens.append(_reflection("reflect_y", [1, 1, -1, 1]))
        gens.append(_reflection("reflect_z", [1, 1, 1, -1]))
        return gens
    if kind is Geometry.SOL4MN:
        return [
            _reflection("reflect_x", [1, -1, 1, 1]),
            _reflection("reflect_y", [1, 1, -1, 1]),
            _reflection("reflect_z", [1, 1, 1, -1]),
        ]
    if kind is Geometry.SOL41:
        return [
            _reflection("s", [1, 1, -1, -1]),
            Isometry("r", _sol41_r_forward, _sol41_r_jacobian),
        ]
    return [
        _reflection("s1", [1, -1, -1, -1]),
        _reflection("s2", [-1, 1, -1, 1]),
    ]


def generator(spec: GeometrySpec, name: str) -> Isometry:
    for gen in stabilizer_generators(spec):
        if gen.name == name:
            return gen
    raise KeyError(f"{spec.kind.value} has no generator {name!r}")


def compose(*maps: Isometry) -> Isometry:
    """``compose(f, g)`` is ``f o g``."""

    def forward(p):
        for m in reversed(maps):
            p = m(p)
        return p

    def jacobian(p):
        jac = np.broadcast_to(np.eye(4), np.shape(p)[:-1] + (4, 4))
        for m in reversed(maps):
            jac = m.jacobian(p) @ jac
            p = m(p)
        return jac

    return Isometry(" o ".join(m.name for m in maps), forward, jacobian, "composite")


def pullback_metric(spec: GeometrySpec, phi: Isometry, p, metric=None) -> np.ndarray:
    """``(phi^* g)_p = J^T g(phi(p)) J``."""
    p = check_point(spec, p)
    fn = metric if metric is not None else (lambda q: metric_at(spec, q))
    jac = phi.jacobian(p)
    return np.swapaxes(jac, -1, -2) @ fn(phi(p)) @ jac


def pullback_residual(spec: GeometrySpec, phi: Isometry, p, metric=None) -> np.ndarray:
    """Largest entry of ``|phi^* g - g|`` normalised by ``sqrt(g_ii g_jj)``.

    The normalisation makes the residual scale-free: the chart metrics span
    many orders of magnitude (``exp(4t)`` factors), while every entry of a
    positive definite matrix is bounded by ``sqrt(g_ii g_jj)``.
    """
    fn = metric if metric is not None else (lambda q: metric_at(spec, q))
    g = fn(check_point(spec, p))
    diff = pullback_metric(spec, phi, p, fn) - g
    d = np.sqrt(np.abs(np.einsum("...ii->...i", g)))
    return np.max(np.abs(diff) / (d[..., :, None] * d[..., None, :]), axis=(-2, -1))


def perturbed_metric(spec: GeometrySpec, coefficient=0.1, pair=(0, 1)):
    """The configured metric plus ``coefficient * dx_i dx_j``; a negative
    control for the harness."""
    i, j = pair

    def fn(q):
        g = metric_at(spec, q).copy()
        g[..., i, j] += coefficient / 2
        g[..., j, i] += coefficient / 2
        return g

    return fn


@dataclass
class InvarianceReport:
    geometry: str
    params: dict
    seed: int
    samples: int
    entries: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((e["max_residual"] for e in self.entries), default=0.0)

    def passed(self, tol=1e-9) -> bool:
        return all(e["max_residual"] < tol for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "kind": "invariance",
            "geometry": self.geometry,
            "params": self.params,
            "seed": self.seed,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "generators": self.entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def invariance_report(
    spec: GeometrySpec, samples: int, seed=0, translations=50, metric=None, threads=1
) -> InvarianceReport:
    """Max pullback residual for every stabilizer generator and ``translations``
    random left translations, each over ``samples`` random points."""
    report = InvarianceReport(spec.kind.value, spec.params(), int(seed), int(samples))
    if samples <= 0:
        return report
    rng = np.random.default_rng(seed)
    maps = list(stabilizer_generators(spec))
    maps += [left_translation(spec, g) for g in random_elements(spec, rng, translations)]
    points = [random_elements(spec, rng, samples) for _ in maps]

    def one(args):
        phi, pts = args
        return float(np.max(pullback_residual(spec, phi, pts, metric)))

    work = list(zip(maps, points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            residuals = list(pool.map(one, work))
    else:
        residuals = [one(w) for w in work]
    for phi, res in zip(maps, residuals):
        report.entries.append({"generator": phi.name, "origin": phi.origin, "max_residual": res, "samples": samples})
    return report

