"""Frame-constant almost complex structures and closedness of Kähler forms.

Candidates are the signed pairings of the orthonormal frame: ``J f_i = s f_j``
and ``J f_j = -s f_i`` on two disjoint index pairs.  The Kähler form of ``J``
for the conformally rescaled metric ``e^{2kt} g`` is

    omega(X, Y) = e^{2kt} g(JX, Y)

and the scan reports how far ``d omega`` is from zero.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .curvature import fd_gradient
from .groups import Geometry, GeometrySpec, check_point, random_elements
from .metrics import metric_at, orthonormal_frame_at

KAHLER_STEP = 1e-5
EXPONENTS = (0.0, 1.0)
PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
SEARCH_SCOPE = (
    "almost complex structures constant in the orthonormal frame with signed-pair structure "
    "(J f_i = +-f_j on two disjoint pairs); evidence about this family only, not about all complex structures"
)


@dataclass(frozen=True)
class AlmostComplexCandidate:
    """Signed pairing ``J f_i = s f_j, J f_j = -s f_i`` for each ``(i, j, s)``."""

    pairs: tuple

    @property
    def matrix(self) -> np.ndarray:
        j = np.zeros((4, 4))
        for i, k, s in self.pairs:
            j[k, i] = s
            j[i, k] = -s
        return j

    @property
    def label(self) -> str:
        def one(i, k, s):
            return f"J e{i + 1} = {'+' if s > 0 else '-'}e{k + 1}"

        return "; ".join(one(*pair) for pair in self.pairs)


def enumerate_candidates() -> list[AlmostComplexCandidate]:
    """All 12 signed pairings, in a fixed order."""
    out = []
    for (p1, p2) in PAIRINGS:
        for s1, s2 in itertools.product((1, -1), repeat=2):
            out.append(AlmostComplexCandidate(((*p1, s1), (*p2, s2))))
    return out


def coordinate_structure(spec: GeometrySpec, j, p) -> np.ndarray:
    """``J`` in the coordinate basis at ``p``: ``F J F^-1``."""
    f = orthonormal_frame_at(spec, p)
    return f @ np.asarray(j, dtype=float) @ np.linalg.inv(f)


def kahler_form(spec: GeometrySpec, j, conformal_exponent, p) -> np.ndarray:
    """Coordinate matrix ``omega_ij = e^{2kt} g(J d_i, d_j)``."""
    p = check_point(spec, p)
    jc = coordinate_structure(spec, j, p)
    g = metric_at(spec, p)
    factor = np.exp(2.0 * conformal_exponent * p[..., 0])[..., None, None]
    omega = factor * (np.swapaxes(jc, -1, -2) @ g)
    return 0.5 * (omega - np.swapaxes(omega, -1, -2))


def exterior_derivative(form_fn, p, step=KAHLER_STEP) -> np.ndarray:
    """``(d omega)_ijk = d_i w_jk + d_j w_ki + d_k w_ij`` by Richardson central differences."""
    dw = fd_gradient(form_fn, p, step)  # [i, j, k] = d_i w_jk
    return dw + np.transpose(dw, _cyc(dw, 1)) + np.transpose(dw, _cyc(dw, 2))


def _cyc(arr, shift):
    # cyclic permutation of the last three axes
    lead = list(range(arr.ndim - 3))
    tail = [arr.ndim - 3 + (i + shift) % 3 for i in range(3)]
    return lead + tail


def d_omega_residual(spec: GeometrySpec, j, conformal_exponent, points, step=KAHLER_STEP) -> float:
    """Largest component of ``d omega`` over ``points`` and index triples.

    Components are taken in the orthonormal frame and divided by the
    conformal factor ``e^{2kt}``.  For these homogeneous metrics that makes
    the residual the same at every point, so it can be compared against a
    fixed tolerance; raw coordinate components scale like ``e^{4t}``.
    """
    points = check_point(spec, points)
    if spec.kind is Geometry.SOL41 and np.any(points[..., 0] <= 2 * step):
        raise ValueError("points too close to the sol41 chart boundary")

    def form(q):
        return kahler_form(spec, j, conformal_exponent, q)

    d = exterior_derivative(form, points, step)
    f = orthonormal_frame_at(spec, points)
    frame_d = np.einsum("...ia,...jb,...kc,...ijk->...abc", f, f, f, d)
    frame_d /= np.exp(2.0 * conformal_exponent * points[..., 0])[..., None, None, None]
    return float(np.max(np.abs(frame_d)))


def compatibility_residual(spec: GeometrySpec, j, p) -> float:
    """``max |g(JX, JY) - g(X, Y)|`` over coordinate basis vectors, relative to ``sqrt(g_ii g_jj)``."""
    jc = coordinate_structure(spec, j, p)
    g = metric_at(spec, p)
    diff = np.swapaxes(jc, -1, -2) @ g @ jc - g
    d = np.sqrt(np.einsum("...ii->...i", g))
    return float(np.max(np.abs(diff) / (d[..., :, None] * d[..., None, :])))


@dataclass
class KahlerReport:
    geometry: str
    params: dict
    seed: int
    points: int
    entries: list = field(default_factory=list)

    def best(self, exponent) -> dict:
        key = _key(exponent)
        return min(self.entries, key=lambda e: (e["residuals"][key], e["index"]))

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "kind": "kahler",
            "geometry": self.geometry,
            "params": self.params,
            "seed": self.seed,
            "points": self.points,
            "scope": SEARCH_SCOPE,
            "candidates": self.entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _key(exponent) -> str:
    return f"exponent_{float(exponent):g}"


def kahler_scan(spec: GeometrySpec, points=100, seed=0, exponents=EXPONENTS, half_width=1.0) -> KahlerReport:
    """Residual table for every candidate and exponent at seeded random points."""
    rng = np.random.default_rng(seed)
    pts = random_elements(spec, rng, points, half_width=half_width)
    report = KahlerReport(spec.kind.value, spec.params(), int(seed), int(points))
    for index, cand in enumerate(enumerate_candidates()):
        residuals = {_key(k): d_omega_residual(spec, cand.matrix, k, pts) for k in exponents}
        report.entries.append({"index": index, "label": cand.label, "matrix": cand.matrix.tolist(), "residuals": residuals})
    return report
