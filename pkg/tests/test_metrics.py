import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thurston4.groups import Geometry, ParameterError, make_spec, random_elements
from thurston4.metrics import (
    coframe_at,
    frame_at,
    frame_derivative,
    gram,
    inner,
    inverse_metric_at,
    metric_at,
    orthonormal_coefficients,
    orthonormal_frame_at,
    random_params,
)
from thurston4.curvature import fd_gradient

KINDS = ("sol40", "sol4mn", "sol41", "nil4")


def _frame_metric(spec, p):
    # independent route: g = Theta^T G Theta with the constant Gram matrix G
    # of the left-invariant frame at the identity
    a = orthonormal_coefficients(spec)
    big_g = np.linalg.inv(a @ a.T)
    th = coframe_at(spec, p)
    return np.swapaxes(th, -1, -2) @ big_g @ th


@pytest.mark.parametrize("kind", KINDS)
def test_orthonormality_random_params(kind, rng):
    for _ in range(5):
        spec = make_spec(kind, **random_params(kind, rng))
        p = random_elements(spec, rng, 200)
        err = gram(spec, p, orthonormal_frame_at(spec, p)) - np.eye(4)
        assert np.max(np.abs(err)) < 1e-12


def test_metric_agrees_with_frame_construction(random_spec, rng):
    p = random_elements(random_spec, rng, 100)
    g = metric_at(random_spec, p)
    np.testing.assert_allclose(g, _frame_metric(random_spec, p), rtol=1e-12, atol=1e-12 * np.max(np.abs(g)))


def test_metric_symmetric_positive_definite(random_spec, rng):
    g = metric_at(random_spec, random_elements(random_spec, rng, 100))
    np.testing.assert_array_equal(g, np.swapaxes(g, -1, -2))
    assert np.all(np.linalg.eigvalsh(g) > 0)


def test_inverse_metric(random_spec, rng):
    p = random_elements(random_spec, rng, 50, half_width=1.0)
    prod = metric_at(random_spec, p) @ inverse_metric_at(random_spec, p)
    np.testing.assert_allclose(prod, np.broadcast_to(np.eye(4), prod.shape), atol=1e-10)


def test_coframe_inverts_frame(random_spec, rng):
    p = random_elements(random_spec, rng, 50)
    prod = coframe_at(random_spec, p) @ frame_at(random_spec, p)
    np.testing.assert_allclose(prod, np.broadcast_to(np.eye(4), prod.shape), atol=1e-12)


def test_frame_derivative_matches_differences(random_spec, rng):
    p = random_elements(random_spec, rng, 10, half_width=1.0)
    d = rng.normal(size=(10, 4))
    fd = np.einsum("nd,ndij->nij", d, fd_gradient(lambda q: frame_at(random_spec, q), p, 1e-4))
    np.testing.assert_allclose(frame_derivative(random_spec, p, d), fd, atol=1e-8)


def test_known_metric_values():
    g = metric_at(make_spec("sol41", tau1=2, tau2=3), [2.0, 1.0, 0.0, 0.0])
    expected = np.array([[3 / 4, -1 / 2, 0, 0], [-1 / 2, 1, 0, 0], [0, 0, 1, -3 / 2], [0, 0, -3 / 2, 3]])
    np.testing.assert_allclose(g, expected, rtol=1e-15)
    g = metric_at(make_spec("nil4", tau1=2, tau2=3, tau3=5, alpha=1), [1.0, 0, 0, 0])
    expected = np.array(
        [[2, 0, 0, 0], [0, 1, -1, 1.5], [0, -1, 4, -4.5], [0, 1.5, -4.5, 0.25 + 4 + 5]], dtype=float
    )
    np.testing.assert_allclose(g, expected, rtol=1e-15)
    g = metric_at(make_spec("sol40", scale=2), [0.5, 0, 0, 0])
    np.testing.assert_allclose(np.diag(g), 2 * np.exp([0, -1, -1, 2]), rtol=1e-15)


def test_scale_is_homothety(rng):
    for kind in KINDS:
        params = random_params(kind, rng)
        base = make_spec(kind, **{**params, "scale": 1.0})
        scaled = make_spec(kind, **params)
        p = random_elements(base, rng, 10)
        np.testing.assert_allclose(metric_at(scaled, p), params["scale"] * metric_at(base, p), rtol=1e-14)


def test_inner_product(spec, rng):
    p = random_elements(spec, rng, 5)
    u, v = rng.normal(size=(2, 5, 4))
    np.testing.assert_allclose(inner(spec, p, u, v), np.einsum("ni,nij,nj->n", u, metric_at(spec, p), v))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10), st.floats(-0.999, 0.999))
def test_nil4_orthonormality_across_parameter_range(tau1, tau2, tau3, frac):
    spec = make_spec("nil4", tau1=tau1, tau2=tau2, tau3=tau3, alpha=frac * math.sqrt(tau3))
    p = np.array([[0.7, -1.0, 2.0, 0.3], [-1.5, 0.2, 0.1, -0.4]])
    err = gram(spec, p, orthonormal_frame_at(spec, p)) - np.eye(4)
    cond = 1 / (1 - frac * frac)
    assert np.max(np.abs(err)) < 1e-12 * cond * 100


def test_alpha_bound_is_sharp():
    make_spec("nil4", tau3=1.0, alpha=0.999999)
    with pytest.raises(ParameterError):
        make_spec("nil4", tau3=1.0, alpha=-1.0)


def test_random_params_are_admissible(rng):
    for kind in KINDS:
        for _ in range(20):
            spec = make_spec(kind, **random_params(kind, rng))
            assert spec.kind is Geometry(kind)
