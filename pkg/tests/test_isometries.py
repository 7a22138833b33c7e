import json

import numpy as np
import pytest

from thurston4.curvature import fd_gradient
from thurston4.groups import identity, make_spec, multiply, random_elements
from thurston4.isometries import (
    compose,
    generator,
    invariance_report,
    left_translation,
    perturbed_metric,
    pullback_residual,
    stabilizer_generators,
)
from thurston4.metrics import random_params

KINDS = ("sol40", "sol4mn", "sol41", "nil4")


def test_generator_jacobians_match_differences(random_spec, rng):
    spec = random_spec
    maps = stabilizer_generators(spec) + [left_translation(spec, g) for g in random_elements(spec, rng, 3, 1.0)]
    p = random_elements(spec, rng, 8, half_width=1.0)
    for phi in maps:
        fd = np.swapaxes(fd_gradient(phi.forward, p, 1e-4), -1, -2)
        np.testing.assert_allclose(phi.jacobian(p), fd, atol=1e-8, err_msg=phi.name)


def test_all_generators_are_isometries(rng):
    for kind in KINDS:
        for _ in range(3):
            spec = make_spec(kind, **random_params(kind, rng))
            report = invariance_report(spec, samples=100, seed=int(rng.integers(1 << 31)), translations=10)
            assert report.passed(1e-9), report.to_json()


def test_negative_control_is_detected(random_spec):
    report = invariance_report(random_spec, samples=100, seed=3, translations=10, metric=perturbed_metric(random_spec))
    assert report.max_residual > 1e-3
    assert not report.passed()


def test_translation_is_homomorphism(spec, rng):
    g, h = random_elements(spec, rng, 2, 1.0)
    p = random_elements(spec, rng, 5, 1.0)
    lhs = compose(left_translation(spec, g), left_translation(spec, h))
    rhs = left_translation(spec, multiply(spec, g, h))
    np.testing.assert_allclose(lhs(p), rhs(p), atol=1e-10)
    np.testing.assert_allclose(lhs.jacobian(p), rhs.jacobian(p), atol=1e-10)


def test_sol41_dihedral_relations(rng):
    spec = make_spec("sol41", tau1=2.0, tau2=0.3)
    r, s = generator(spec, "r"), generator(spec, "s")
    p = random_elements(spec, rng, 20)
    r2 = compose(r, r)
    t, x, y, z = p.T
    np.testing.assert_allclose(r2(p), np.stack([t, -x, -y, z], axis=-1), atol=1e-12)
    np.testing.assert_allclose(compose(r2, r2)(p), p, atol=1e-11)
    # s r s = r^-1 = r^3
    np.testing.assert_allclose(compose(s, r, s)(p), compose(r2, r)(p), atol=1e-11)
    # r fixes the identity and is an automorphism of the group
    np.testing.assert_allclose(r(identity(spec)), identity(spec))
    g, h = random_elements(spec, rng, 2)
    np.testing.assert_allclose(r(multiply(spec, g, h)), multiply(spec, r(g), r(h)), atol=1e-11)


def test_sol41_r_isometry_for_any_taus(rng):
    # not only for tau1 = tau2
    for tau1, tau2 in [(0.3, 3.0), (4.0, 0.25), (1.0, 1.0)]:
        spec = make_spec("sol41", tau1=tau1, tau2=tau2)
        p = random_elements(spec, rng, 200)
        assert np.max(pullback_residual(spec, generator(spec, "r"), p)) < 1e-12


def test_sol40_rotations_any_angle(rng):
    from thurston4.isometries import sol40_rotation

    spec = make_spec("sol40", scale=1.7)
    p = random_elements(spec, rng, 50)
    for angle in rng.uniform(0, 2 * np.pi, 10):
        assert np.max(pullback_residual(spec, sol40_rotation(angle), p)) < 1e-12


def test_generators_fix_identity(spec):
    e = identity(spec)
    for phi in stabilizer_generators(spec):
        np.testing.assert_allclose(phi(e), e, atol=1e-15)


def test_report_is_deterministic(random_spec):
    a = invariance_report(random_spec, samples=30, seed=9, translations=5).to_json()
    b = invariance_report(random_spec, samples=30, seed=9, translations=5, threads=4).to_json()
    assert a == b
    data = json.loads(a)
    assert data["kind"] == "invariance" and data["version"] == 1
    assert len(data["generators"]) == len(stabilizer_generators(random_spec)) + 5


def test_empty_report():
    report = invariance_report(make_spec("nil4"), samples=0)
    assert report.entries == [] and report.max_residual == 0.0 and report.passed()


def test_unknown_generator():
    with pytest.raises(KeyError):
        generator(make_spec("nil4"), "r")


def test_sol40_unit_translation():
    spec = make_spec("sol40")
    phi = left_translation(spec, [1.0, 0, 0, 0])
    p = np.array([0.3, 1.0, -2.0, 0.5])
    np.testing.assert_allclose(phi(p), [1.3, np.e, -2 * np.e, 0.5 * np.exp(-2)], rtol=1e-15)
    np.testing.assert_allclose(phi.jacobian(p), np.diag([1, np.e, np.e, np.exp(-2)]), rtol=1e-15)


def test_identity_translation(spec, rng):
    phi = left_translation(spec, identity(spec))
    p = random_elements(spec, rng, 10)
    np.testing.assert_allclose(phi(p), p, atol=1e-15)
    np.testing.assert_array_equal(phi.jacobian(p)[0], np.eye(4))


def test_reflections_are_involutions(spec, rng):
    p = random_elements(spec, rng, 10)
    for phi in stabilizer_generators(spec):
        if phi.name.startswith(("reflect", "s")):
            np.testing.assert_allclose(compose(phi, phi)(p), p, atol=0)
