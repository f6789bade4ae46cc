import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnetik import geometries as geo
from magnetik.chart import MetricField, random_orthonormal, sample_points
from magnetik.connection import (
    christoffels,
    covariant_derivative,
    ricci,
    riemann,
    riemann_tensor,
    sectional,
    self_test,
    tidal,
    torsion_residual,
)
from magnetik.errors import NotOrthonormal, NotUnit

coords = st.floats(-0.9, 0.9, allow_nan=False)


@pytest.fixture(scope="module")
def g3():
    return MetricField.induced(geo.sphere_patch(3))


@pytest.fixture(scope="module")
def g2():
    return MetricField.induced(geo.sphere_patch(2))


def test_flat_christoffels_vanish():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    assert np.array_equal(christoffels(g, np.ones(3)).gamma, np.zeros((3, 3, 3)))


def test_s2_christoffels_vanish_at_origin(g2):
    assert np.max(np.abs(christoffels(g2, np.zeros(2)).gamma)) < 1e-12


def test_s2_christoffels_match_conformal_formula(g2):
    x = np.array([0.3, 0.0])
    lam1 = -2 * x[0] / (1 + x @ x)  # d_1 of log(2 / (1 + |u|^2))
    gam = christoffels(g2, x).gamma
    assert gam[0, 0, 0] == pytest.approx(lam1, abs=1e-10)
    assert gam[1, 1, 0] == pytest.approx(lam1, abs=1e-10)
    assert gam[0, 1, 1] == pytest.approx(-lam1, abs=1e-10)


def test_christoffels_symmetric(g3):
    gam = christoffels(g3, np.array([0.2, -0.5, 0.4])).gamma
    assert np.max(np.abs(gam - gam.transpose(0, 2, 1))) < 1e-14


def test_covariant_derivative_flat_examples():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    x = np.array([0.3, 0.1, -0.2])
    e1 = np.eye(3)[0]
    assert np.allclose(covariant_derivative(g, lambda y: np.array([1.0, 2.0, 3.0]), e1, x), 0)
    assert np.allclose(covariant_derivative(g, lambda y: y, e1, x), e1, atol=1e-9)


def test_frame_connection_on_s3(g3):
    """nabla_{E_j} E_i = E_i x E_j = E_k for the left-invariant frame."""
    Ei, Ej, Ek = (geo.s3_frame_field(w) for w in "ijk")
    worst = 0.0
    for x in sample_points(g3.patch, 100):
        res = covariant_derivative(g3, Ei, Ej(x), x) - Ek(x)
        worst = max(worst, np.sqrt(res @ g3(x) @ res))
    assert worst < 1e-6


def test_torsion_free(g3):
    Ei, Ej = geo.s3_frame_field("i"), geo.s3_frame_field("j")
    for x in sample_points(g3.patch, 10):
        assert torsion_residual(g3, Ei, Ej, x) < 1e-6


def test_flat_curvature_vanishes():
    g = MetricField.euclidean(geo.euclidean_patch(3))
    e = np.eye(3)
    assert np.allclose(riemann(g, np.zeros(3), e[0], e[1], e[1]), 0)
    assert sectional(g, np.zeros(3), e[0], e[1]) == 0
    assert ricci(g, np.zeros(3), e[0]) == 0


def test_s3_constant_curvature(g3):
    rng = np.random.default_rng(7)
    for x in sample_points(g3.patch, 20):
        v, w = random_orthonormal(g3, x, 2, rng).T
        assert sectional(g3, x, v, w) == pytest.approx(1.0, abs=1e-5)
        assert ricci(g3, x, v) == pytest.approx(2.0, abs=1e-5)
        Rwvv = tidal(g3, x, v, w)
        assert np.max(np.abs(Rwvv - w)) < 1e-5


def test_s2_constant_curvature(g2):
    rng = np.random.default_rng(5)
    for x in sample_points(g2.patch, 20):
        v, w = random_orthonormal(g2, x, 2, rng).T
        assert sectional(g2, x, v, w) == pytest.approx(1.0, abs=1e-5)
        assert ricci(g2, x, v) == pytest.approx(1.0, abs=1e-5)
    assert self_test() == pytest.approx(1.0, abs=1e-5)


@settings(max_examples=25, deadline=None)
@given(st.tuples(coords, coords, coords))
def test_riemann_symmetries(g3, x):
    x = np.array(x)
    Rm = riemann_tensor(g3, x)
    low = np.einsum("ml,lkij->mkij", g3(x), Rm)  # R(d_i, d_j, d_k, d_m)
    assert np.max(np.abs(Rm + Rm.transpose(0, 1, 3, 2))) < 1e-6
    assert np.max(np.abs(low + low.transpose(1, 0, 2, 3))) < 1e-6
    assert np.max(np.abs(low - low.transpose(2, 3, 0, 1))) < 1e-6
    bianchi = Rm + Rm.transpose(0, 2, 3, 1) + Rm.transpose(0, 3, 1, 2)
    assert np.max(np.abs(bianchi)) < 1e-6


def test_sectional_rejects_bad_pairs(g3):
    x = np.zeros(3)
    with pytest.raises(NotOrthonormal):
        sectional(g3, x, np.eye(3)[0], np.eye(3)[1])
    with pytest.raises(NotUnit):
        ricci(g3, x, np.eye(3)[0])


def test_raw_fd_curvature_agrees(g3):
    raw = MetricField.induced(geo.sphere_patch(3).raw())
    x = np.array([0.2, 0.3, -0.1])
    assert np.max(np.abs(riemann_tensor(raw, x) - riemann_tensor(g3, x))) < 1e-4
