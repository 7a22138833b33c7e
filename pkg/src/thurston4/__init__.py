"""Numerical geometry of the solvable 4-dimensional Thurston geometries
Sol4_0, Sol4_{m,n}, Sol4_1 and Nil4: group structure, invariant metrics,
curvature, geodesics, isometry checks and frame-constant Kähler forms."""
from .curvature import riemann_at, ricci_at, scalar_at, sectional
from .geodesics import ShootingOptions, distance_shooting, distance_shooting_batch, exp_map, integrate_geodesic
from .groups import (
    DomainError,
    Geometry,
    GeometrySpec,
    ParameterError,
    inverse,
    make_spec,
    multiply,
    nil4,
    sol40,
    sol41,
    sol4mn,
)
from .isometries import invariance_report, left_translation, stabilizer_generators
from .kahler import d_omega_residual, enumerate_candidates, kahler_form, kahler_scan
from .metrics import frame_at, metric_at, orthonormal_frame_at, validate_params
from .roots import RootKind, solve_roots

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Geometry",
    "GeometrySpec",
    "ParameterError",
    "RootKind",
    "ShootingOptions",
    "d_omega_residual",
    "distance_shooting",
    "distance_shooting_batch",
    "enumerate_candidates",
    "exp_map",
    "frame_at",
    "integrate_geodesic",
    "invariance_report",
    "inverse",
    "kahler_form",
    "kahler_scan",
    "left_translation",
    "make_spec",
    "metric_at",
    "multiply",
    "nil4",
    "orthonormal_frame_at",
    "ricci_at",
    "riemann_at",
    "scalar_at",
    "sectional",
    "sol40",
    "sol41",
    "sol4mn",
    "solve_roots",
    "stabilizer_generators",
    "validate_params",
]
