import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnetik import geometries as geo
from magnetik.chart import (
    FDSteps,
    FramePoint,
    MetricField,
    Patch,
    TangentVector,
    TwoFormField,
    check_immersion,
    fd_gradient,
    fd_hessian,
    fd_partial,
    gram_schmidt,
    inner,
    orthonormal_complement,
    project_v,
    project_vperp,
    random_orthonormal,
    sample_points,
)
from magnetik.errors import BaseMismatch, DegenerateFrame, DomainError, NotOrthonormal, NotUnit

coords = st.floats(-0.9, 0.9, allow_nan=False)


def test_fd_partial_polynomial_exact():
    assert fd_partial(lambda x: x[0] ** 2, np.array([1.0]), 0) == pytest.approx(2.0, abs=1e-9)


def test_fd_partial_second_order_odd_function():
    assert abs(fd_partial(lambda x: np.sin(x[0]), np.array([0.0]), 0, order=2)) < 1e-6


def test_fd_partial_prefers_analytic_callback():
    val = fd_partial(lambda x: 0.0, np.array([0.3]), 0, analytic=lambda x, i: 7.0)
    assert val == 7.0


def test_fd_partial_conformal_factor_flat_at_origin():
    g = MetricField.induced(geo.sphere_patch(3))
    d = fd_partial(lambda u: g(u)[0, 0], np.zeros(3), 0)
    assert abs(d) < 1e-9
    assert g(np.zeros(3))[0, 0] == pytest.approx(4.0)


def test_fd_partial_rejects_stencil_outside_domain():
    with pytest.raises(DomainError):
        fd_partial(lambda x: x[0], np.array([2.0 - 1e-8, 0.0]), 0, radius=2.0)


def test_fd_central_difference_is_second_order():
    f = lambda x: np.sin(3 * x[0])
    x = np.array([0.7])
    exact = 3 * np.cos(2.1)
    e1 = abs(fd_partial(f, x, 0, h=1e-2) - exact)
    e2 = abs(fd_partial(f, x, 0, h=5e-3) - exact)
    assert e1 / e2 >= 3.5


def test_fd_hessian_matches_quadratic_form():
    A = np.array([[2.0, 1.0], [1.0, -3.0]])
    H = fd_hessian(lambda x: 0.5 * x @ A @ x, np.array([0.2, -0.1]), 1e-3)
    assert np.allclose(H, A, atol=1e-6)


@pytest.mark.parametrize("key", ["s2-stereo", "s3-stereo"])
def test_analytic_derivatives_agree_with_differences(key):
    patch = geo.patch(key)
    raw = patch.raw()
    for x in sample_points(patch, 100):
        assert np.max(np.abs(patch.jacobian(x) - raw.jacobian(x))) < 1e-6
        assert np.max(np.abs(patch.hessian(x) - raw.hessian(x))) < 1e-6


@pytest.mark.parametrize("key", ["euclidean3", "euclidean4", "s2-stereo", "s3-stereo", "plane-in-r3"])
def test_catalog_patches_are_immersions(key):
    patch = geo.patch(key)
    for x in sample_points(patch, 20):
        assert check_immersion(patch, x) > 1e-8


def test_patch_check_errors():
    patch = geo.sphere_patch(2)
    with pytest.raises(DomainError):
        patch.check([3.0, 0.0])
    with pytest.raises(DomainError):
        patch.check([0.0, 0.0, 0.0])
    with pytest.raises(KeyError):
        geo.patch("torus")


def test_induced_metric_is_jtj_and_spd():
    patch = geo.sphere_patch(3)
    g = MetricField.induced(patch)
    for x in sample_points(patch, 20):
        J = patch.jacobian(x)
        G = g(x)
        assert np.max(np.abs(G - J.T @ J)) < 1e-10
        assert np.array_equal(G, G.T)
        g.check_at(x)


def test_metric_derivative_matches_differences():
    patch = geo.sphere_patch(3)
    g = MetricField.induced(patch)
    x = np.array([0.3, -0.4, 0.2])
    fd = fd_gradient(g, x, 1e-6)
    assert np.max(np.abs(g.derivative(x) - fd)) < 1e-7


def test_pullback_metric_derivative_matches_differences():
    sub = geo.submanifold("s2-in-r3-uniform")
    g = sub.N.g
    u = np.array([0.4, 0.7])
    assert np.max(np.abs(g.derivative(u) - fd_gradient(g, u, 1e-6))) < 1e-7
    ds = sub.N.sigma.derivative(u)
    assert np.max(np.abs(ds - fd_gradient(sub.N.sigma, u, 1e-6))) < 1e-7


def test_two_form_antisymmetric_and_closed():
    system = geo.s3_system("i")
    for x in sample_points(system.patch, 20):
        S = system.sigma(x)
        assert np.array_equal(S, -S.T)
        assert system.closedness_residual(x) < 1e-5


def test_inner_examples():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    x = np.zeros(3)
    e = np.eye(3)
    assert inner(g, x, e[0], e[0]) == 1.0
    assert inner(g, x, e[0], e[1]) == 0.0
    gs = MetricField.induced(geo.sphere_patch(3))
    assert inner(gs, x, e[0], e[0]) == pytest.approx(4.0, abs=1e-14)


def test_inner_base_mismatch():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    v = TangentVector(np.ones(3), np.eye(3)[0])
    with pytest.raises(BaseMismatch):
        inner(g, np.zeros(3), v, v)


def test_gram_schmidt_examples():
    g = MetricField.euclidean(geo.euclidean_patch(2))
    x = np.zeros(2)
    F = gram_schmidt(g, x, [np.array([2.0, 0.0])]).matrix()
    assert np.allclose(F[:, 0], [1.0, 0.0])
    F = gram_schmidt(g, x, [np.array([1.0, 1.0]), np.array([0.0, 1.0])]).matrix()
    assert np.allclose(F[:, 0], np.array([1.0, 1.0]) / np.sqrt(2))
    assert np.allclose(F[:, 1], np.array([-1.0, 1.0]) / np.sqrt(2))
    with pytest.raises(DegenerateFrame):
        gram_schmidt(g, x, [np.array([1.0, 1.0]), np.array([2.0, 2.0])])


def test_gram_schmidt_on_s3_chart():
    g = MetricField.induced(geo.sphere_patch(3))
    x = np.zeros(3)
    F = gram_schmidt(g, x, list(np.eye(3))).matrix()
    assert np.max(np.abs(F.T @ g(x) @ F - np.eye(3))) < 1e-12
    assert np.allclose(F, 0.5 * np.eye(3))


def test_frame_point_repairs_small_drift_and_rejects_large():
    g = MetricField.euclidean(geo.euclidean_patch(2))
    x = np.zeros(2)
    fp = FramePoint.checked(g, x, [np.array([1.0, 1e-8]), np.array([0.0, 1.0])])
    F = fp.matrix()
    assert np.max(np.abs(F.T @ F - np.eye(2))) < 1e-12
    with pytest.raises(NotOrthonormal):
        FramePoint.checked(g, x, [np.array([1.0, 1e-3]), np.array([0.0, 1.0])])


def test_projector_examples():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    x = np.zeros(3)
    e = np.eye(3)
    assert np.allclose(project_v(g, x, e[0], e[0]), e[0])
    assert np.allclose(project_vperp(g, x, e[0], e[0]), 0)
    assert np.allclose(project_v(g, x, e[0], e[1]), 0)
    with pytest.raises(NotUnit):
        project_v(g, x, 2 * e[0], e[1])


@settings(max_examples=60, deadline=None)
@given(st.tuples(coords, coords, coords), st.integers(0, 2**32 - 1))
def test_projectors_complete_and_idempotent(x, seed):
    g = MetricField.induced(geo.sphere_patch(3))
    x = np.array(x)
    rng = np.random.default_rng(seed)
    v = random_orthonormal(g, x, 1, rng)[:, 0]
    z = rng.standard_normal(3)
    pv = project_v(g, x, v, z)
    pp = project_vperp(g, x, v, z)
    assert np.max(np.abs(pv + pp - z)) < 1e-12 * max(1.0, np.abs(z).max())
    assert np.max(np.abs(project_vperp(g, x, v, pp) - pp)) < 1e-12 * max(1.0, np.abs(z).max())


def test_projection_keeps_submanifold_normals():
    sub = geo.submanifold("s2-in-r3-uniform")
    u = np.array([0.3, -0.5])
    pt = sub.at(u)
    v = random_orthonormal(sub.N.g, u, 1, np.random.default_rng(1))[:, 0]
    vM = pt.P @ v
    z_nor = pt.nor(np.array([0.3, 1.2, -0.7]))
    assert np.max(np.abs(project_vperp(sub.M.g, pt.x, vM, z_nor) - z_nor)) < 1e-10


def test_orthonormal_complement_is_deterministic_basis():
    g = MetricField.induced(geo.sphere_patch(3))
    x = np.array([0.2, 0.1, -0.3])
    v = random_orthonormal(g, x, 1, np.random.default_rng(3))[:, 0]
    E = orthonormal_complement(g, x, v)
    F = np.column_stack([v, E])
    assert np.max(np.abs(F.T @ g(x) @ F - np.eye(3))) < 1e-12
    assert np.array_equal(E, orthonormal_complement(g, x, v))


def test_sample_points_in_ball_and_seeded():
    patch = geo.sphere_patch(3)
    a = sample_points(patch, 50)
    b = sample_points(patch, 50)
    assert np.array_equal(a, b)
    assert np.all(np.linalg.norm(a, axis=1) <= 0.8 * patch.domain_radius)
    assert not np.array_equal(a, sample_points(patch, 50, seed=7))


def test_fd_steps_scale_with_point():
    s = FDSteps(1e-6, 1e-4)
    assert s.step(1, np.zeros(2)) == 1e-6
    assert s.step(2, np.array([3.0, 4.0])) == pytest.approx(5e-4)


def test_patch_validation():
    with pytest.raises(ValueError):
        Patch(3, 2, lambda x: x)
    with pytest.raises(ValueError):
        Patch(1, 1, lambda x: x, domain_radius=0.0)


def test_two_form_constant_and_zero():
    patch = geo.euclidean_patch(2)
    assert np.array_equal(TwoFormField.zero(patch)(np.zeros(2)), np.zeros((2, 2)))
    s = TwoFormField.constant(patch, [[0.0, 2.0], [-2.0, 0.0]])
    assert s(np.ones(2))[0, 1] == 2.0
    assert s.closedness_residual(np.zeros(2)) == 0.0
