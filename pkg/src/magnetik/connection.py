"""Levi-Civita connection, Riemann curvature and the classical curvatures.

Curvature follows R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
so that ``sectional`` is +1 on unit spheres; :func:`self_test` pins this.
In coordinates ``R(d_i, d_j) d_k = Rm[l, k, i, j] d_l``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import (
    MetricField,
    check_unit,
    comps,
    fd_gradient,
    inner,
    orthonormal_complement,
)
from .errors import DomainError, NotOrthonormal


@dataclass(frozen=True)
class ChristoffelTable:
    base: np.ndarray
    gamma: np.ndarray  # gamma[k, i, j] = Gamma^k_ij

    def apply(self, u, w):
        """Gamma(u, w)^k = Gamma^k_ij u^i w^j."""
        return np.einsum("kij,i,j->k", self.gamma, u, w)


def christoffel_array(g: MetricField, x) -> np.ndarray:
    dg = g.derivative(x)
    ginv = g.inverse(x)
    # lowered[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    lowered = dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg
    return 0.5 * np.einsum("kl,lij->kij", ginv, lowered)


def christoffels(g: MetricField, x) -> ChristoffelTable:
    x = g.patch.check(x)
    return ChristoffelTable(x, christoffel_array(g, x))


def is_nested(g: MetricField) -> bool:
    """True when metric derivatives themselves come from finite differences."""
    return g._deriv is None


def christoffel_derivative(g: MetricField, x) -> np.ndarray:
    """``dG[a, k, i, j] = d_a Gamma^k_ij`` by central differences with step h2."""
    x = g.patch.check(x)
    h = g.patch.steps.step(2, x)
    return fd_gradient(lambda y: christoffel_array(g, y), x, h, g.patch.domain_radius)


def riemann_from(gamma, dgamma):
    # Rm[l,k,i,j] = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    deriv = np.einsum("iljk->lkij", dgamma)
    quad = np.einsum("lim,mjk->lkij", gamma, gamma)
    return deriv - deriv.transpose(0, 1, 3, 2) + quad - quad.transpose(0, 1, 3, 2)


def riemann_tensor(g: MetricField, x) -> np.ndarray:
    return riemann_from(christoffel_array(g, x), christoffel_derivative(g, x))


def riemann(g: MetricField, x, w, v, z):
    """R_x(w, v) z."""
    Rm = riemann_tensor(g, x)
    return np.einsum("lkij,i,j,k->l", Rm, comps(w, x), comps(v, x), comps(z, x))


def tidal(g: MetricField, x, v, w):
    """The tidal force F_(x,v)(w) = R_x(w, v) v."""
    return riemann(g, x, w, v, v)


def directional(fn, x, u, h, radius=None):
    """d/dt fn(x + t u) at t = 0 by a central difference with step ``h`` in x."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu == 0.0:
        return np.zeros_like(np.asarray(fn(x), dtype=float))
    t = h / nu
    if radius is not None and np.isfinite(radius):
        for p in (x + t * u, x - t * u):
            if np.linalg.norm(p) > radius:
                raise DomainError(f"stencil point {p} outside chart ball of radius {radius}")
    return (np.asarray(fn(x + t * u)) - np.asarray(fn(x - t * u))) / (2 * t)


def covariant_derivative(g: MetricField, X, u, x=None):
    """(nabla_u X)^k = u^i d_i X^k + Gamma^k_ij u^i X^j for a vector field callable X."""
    if x is None:
        x = u.base
    x = g.patch.check(x)
    u = comps(u, x)
    dX = directional(X, x, u, g.patch.steps.step(1, x), g.patch.domain_radius)
    return dX + np.einsum("kij,i,j->k", christoffel_array(g, x), u, np.asarray(X(x), dtype=float))


def _check_orthonormal(g, x, v, w, tol=1e-8):
    G = g(x)
    gram = np.array([[v @ G @ v, v @ G @ w], [w @ G @ v, w @ G @ w]])
    if np.max(np.abs(gram - np.eye(2))) > tol:
        raise NotOrthonormal(f"pair is not g-orthonormal (Gram {gram.tolist()})")


def sectional(g: MetricField, x, v, w, Rm=None) -> float:
    x = g.patch.check(x)
    v, w = comps(v, x), comps(w, x)
    _check_orthonormal(g, x, v, w)
    Rm = riemann_tensor(g, x) if Rm is None else Rm
    Rwvv = np.einsum("lkij,i,j,k->l", Rm, w, v, v)
    return inner(g, x, Rwvv, w)


def ricci(g: MetricField, x, v, Rm=None, basis=None) -> float:
    """Ric(v, v) as the trace of the tidal operator over an orthonormal basis of v^perp."""
    x = g.patch.check(x)
    v = comps(v, x)
    check_unit(g, x, v)
    Rm = riemann_tensor(g, x) if Rm is None else Rm
    E = orthonormal_complement(g, x, v) if basis is None else basis
    G = g(x)
    total = 0.0
    for e in E.T:
        total += np.einsum("lkij,i,j,k->l", Rm, e, v, v) @ G @ e
    return float(total)


def torsion_residual(g: MetricField, X, Y, x) -> float:
    """|nabla_X Y - nabla_Y X - [X, Y]| for vector field callables."""
    x = g.patch.check(x)
    h = g.patch.steps.step(1, x)
    r = g.patch.domain_radius
    bracket = directional(Y, x, X(x), h, r) - directional(X, x, Y(x), h, r)
    res = covariant_derivative(g, Y, X(x), x) - covariant_derivative(g, X, Y(x), x) - bracket
    return float(np.sqrt(max(res @ g(x) @ res, 0.0)))


def self_test(tol=1e-5):
    """Assert the curvature sign convention: sec = +1 on the unit round 2-sphere."""
    from .geometries import sphere_patch

    patch = sphere_patch(2)
    g = MetricField.induced(patch)
    x = np.array([0.3, -0.2])
    G = g(x)
    v = np.array([1.0, 0.0]) / np.sqrt(G[0, 0])
    w = np.array([-G[0, 1], G[0, 0]])
    w /= np.sqrt(w @ G @ w)
    k = sectional(g, x, v, w)
    if abs(k - 1.0) > tol:
        raise AssertionError(f"curvature convention self-test failed: sec = {k}")
    return k
