import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnetik import dim3, geometries as geo
from magnetik.chart import random_orthonormal, sample_points
from magnetik.errors import DimensionError, NotKilling, NotOrthonormal, NotStatic
from magnetik.magnetic import MagneticCurvature, a_operator, lorentz, mag_sec
from magnetik.suites import (
    appendix_frame_residuals,
    double_cross_residuals,
    int_curl_residual,
    s3_manifold,
    s3_specialization_residual,
    static_K_check,
)

coords = st.floats(-1.0, 1.0, allow_nan=False)


@pytest.fixture(scope="module")
def flat():
    return dim3.OrientedThreeManifold(geo.flat_uniform_system((0.0, 0.0, 0.0)))


@pytest.fixture(scope="module")
def s3m():
    return s3_manifold()


@pytest.fixture(scope="module")
def Ei():
    return dim3.KillingField(geo.s3_frame_field("i"), "E_i")


def test_requires_three_dimensions():
    with pytest.raises(DimensionError):
        dim3.OrientedThreeManifold(geo.flat_plane_system())
    with pytest.raises(ValueError):
        dim3.OrientedThreeManifold(geo.flat_uniform_system(), volume_sign=0)


def test_flat_cross_examples(flat):
    e = np.eye(3)
    x = np.zeros(3)
    assert np.allclose(dim3.cross(flat, x, e[0], e[1]), e[2])
    assert np.allclose(dim3.cross(flat, x, e[1], e[1]), 0)
    flipped = dim3.OrientedThreeManifold(flat.system, volume_sign=-1)
    assert np.allclose(dim3.cross(flipped, x, e[0], e[1]), -e[2])
    with pytest.raises(DimensionError):
        dim3.cross(flat, x, e[0, :2], e[1, :2])


def test_flat_curl_examples(flat):
    x = np.array([0.3, -0.2, 0.5])
    grad = lambda y: np.array([2 * y[0] * y[1], y[0] ** 2, np.cos(y[2])])  # grad(x^2 y + sin z)
    assert np.max(np.abs(dim3.curl(flat, grad, x))) < 1e-8
    rot = lambda y: np.array([-y[1], y[0], 0.0])
    assert np.allclose(dim3.curl(flat, rot, x), [0, 0, 2], atol=1e-8)


def test_s3_frame_at_origin():
    Ei, Ej, Ek = dim3.s3_frame(np.zeros(3))
    assert np.allclose(geo.s3_frame_ambient(np.array([1.0, 0, 0, 0]))[0], [0, 1, 0, 0])
    assert np.allclose(Ei, [0.5, 0, 0])  # d_1 scaled to unit length for g = 4I
    assert np.allclose(Ej, [0, 0.5, 0]) and np.allclose(Ek, [0, 0, 0.5])


def test_s3_frame_identities():
    r = appendix_frame_residuals(100)
    assert r["orthonormal"] < 1e-10
    assert r["curl"] < 1e-6
    assert r["bracket"] < 1e-6
    assert r["cross"] < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.tuples(coords, coords, coords), st.integers(0, 2**32 - 1))
def test_double_cross_identities(s3m, flat, x, seed):
    rng = np.random.default_rng(seed)
    x = np.array(x)
    for m in (flat, s3m):
        v, w, z, q = rng.standard_normal((4, 3))
        assert max(double_cross_residuals(m, x, v, w, z, q)) < 1e-8 * max(1.0, np.abs([v, w, z, q]).max() ** 3)


def test_koszul_curl(s3m, Ei):
    """nabla_Y B = 1/2 curl B x Y for Killing B."""
    for x in sample_points(s3m.patch, 20):
        D = dim3.covariant_jacobian(s3m, Ei, x)
        cB = dim3.curl(s3m, Ei, x)
        for e in np.eye(3):
            assert np.max(np.abs(D @ e - 0.5 * dim3.cross(s3m, x, cB, e))) < 1e-6
        assert int_curl_residual(s3m, Ei, x) < 1e-5


def test_lorentz_of_killing_system_is_cross(s3m, Ei):
    system = dim3.killing_system(s3m, Ei)
    x = np.array([0.2, 0.4, -0.6])
    Y = lorentz(system, x)
    for w in np.eye(3):
        assert np.allclose(Y @ w, dim3.cross(s3m, x, Ei(x), w), atol=1e-12)
    assert np.allclose(system.sigma(x), s3m.system.sigma(x), atol=1e-12)


def test_killing_check(s3m, Ei):
    x = np.array([0.1, 0.2, 0.3])
    assert Ei.killing_residual(s3m, x) < 1e-6
    bad = dim3.KillingField(lambda y: y)
    with pytest.raises(NotKilling):
        bad.check(s3m, x)
    with pytest.raises(NotKilling):
        dim3.killing_A(s3m, bad, 1.0, x, 0.5 * np.eye(3)[0], 0.5 * np.eye(3)[1])


def test_killing_flat_examples(flat):
    b = 0.7
    B = dim3.KillingField(lambda y: np.array([0.0, 0.0, b]))
    e = np.eye(3)
    x = np.zeros(3)
    assert np.allclose(dim3.killing_A(flat, B, 1.0, x, e[0], e[1]), b**2 * e[1])
    zero = dim3.KillingField(lambda y: np.zeros(3))
    assert np.allclose(dim3.killing_A(flat, zero, 1.0, x, e[0], e[1]), 0)
    assert np.allclose(dim3.killing_nablaY(flat, zero, 1.0, x, e[0], e[1]), 0)
    assert np.allclose(dim3.killing_Rs(flat, zero, 1.0, x, e[0], e[1]), 0)
    assert dim3.killing_mag_sec(flat, zero, 2.0, x, e[0], e[1]) == pytest.approx(0.0, abs=1e-12)


def test_killing_without_field_on_s3(s3m):
    zero = dim3.KillingField(lambda y: np.zeros(3))
    x = np.array([0.3, 0.1, 0.0])
    v, w = random_orthonormal(s3m.g, x, 2, np.random.default_rng(1)).T
    assert dim3.killing_mag_sec(s3m, zero, 1.5, x, v, w) == pytest.approx(2.25, abs=1e-5)
    assert dim3.killing_mag_ric(s3m, zero, 1.5, x, v) == pytest.approx(4.5, abs=1e-5)


def test_killing_closed_forms_match_generic(s3m, Ei):
    rng = np.random.default_rng(4)
    for x in sample_points(s3m.patch, 100, seed=4):
        mc = MagneticCurvature(s3m.system, x)
        v, w = random_orthonormal(s3m.g, x, 2, rng).T
        assert np.max(np.abs(dim3.killing_A(s3m, Ei, 1.0, x, v, w) - mc.A(v, w))) < 1e-6
        for s in (0.3, 0.5, 1.0, 2.0):
            assert np.max(np.abs(dim3.killing_Rs(s3m, Ei, s, x, v, w) - mc.R_s(s, v, w))) < 1e-5
            assert abs(dim3.killing_mag_sec(s3m, Ei, s, x, v, w, check=False) - mc.sec(s, v, w)) < 1e-5
            assert abs(dim3.killing_mag_ric(s3m, Ei, s, x, v, check=False) - mc.ric(s, v)) < 1e-5


def test_killing_nablaY_matches_generic(s3m, Ei):
    x = np.array([-0.3, 0.2, 0.5])
    mc = MagneticCurvature(s3m.system, x)
    v, w = random_orthonormal(s3m.g, x, 2, np.random.default_rng(0)).T
    assert np.max(np.abs(dim3.killing_nablaY(s3m, Ei, 1.0, x, v, w) - mc.nablaY(w, v))) < 1e-6


def test_ricci_basis_trick(s3m, Ei):
    x = np.array([0.1, -0.1, 0.2])
    v, w = random_orthonormal(s3m.g, x, 2, np.random.default_rng(6)).T
    for s in (0.3, 1.0):
        assert dim3.killing_mag_ric_basis(s3m, Ei, s, x, v, w) == pytest.approx(
            dim3.killing_mag_ric(s3m, Ei, s, x, v), abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 3), st.floats(-1, 1), st.floats(-1, 1))
def test_s3_specialization_is_exact(s, a, b):
    assert s3_specialization_residual(s, a, b) < 1e-8


def test_killing_pair_validation(s3m, Ei):
    e = np.eye(3)
    with pytest.raises(NotOrthonormal):
        dim3.killing_mag_sec(s3m, Ei, 1.0, np.zeros(3), e[0], e[1])


def test_static_plane():
    sub = geo.submanifold("plane-in-r3-static")
    m = dim3.OrientedThreeManifold(sub.M)
    for b in (0.7, 0.0):
        B = dim3.KillingField(lambda y, b=b: np.array([0.0, 0.0, b]))
        for s in (0.5, 1.0, 2.0):
            v = np.array([0.6, 0.8])
            K = dim3.static_K(m, B, sub, s, np.array([0.3, -0.4]), v)
            assert K == pytest.approx(b**2, abs=1e-6)
            plane = geo.flat_plane_system(b)
            assert mag_sec(plane, s, np.zeros(2), v, np.array([-0.8, 0.6])) == pytest.approx(K, abs=1e-6)


def test_static_rejects_hopf_field(s3m, Ei):
    with pytest.raises(NotStatic):
        static_K_check(s3m, Ei, s3m.patch.steps)


def test_static_rejects_tangent_field():
    sub = geo.submanifold("plane-in-r3-static")
    m = dim3.OrientedThreeManifold(sub.M)
    B = dim3.KillingField(lambda y: np.array([1.0, 0.0, 0.0]))
    with pytest.raises(NotStatic):
        dim3.static_K(m, B, sub, 1.0, np.zeros(2), np.array([1.0, 0.0]))
