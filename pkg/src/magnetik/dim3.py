"""Cross product, curl and Killing magnetic systems on oriented 3-manifolds.

With the volume form mu = sign * sqrt(det g) dx^1 ^ dx^2 ^ dx^3, the cross
product is the g-dual of mu(v, w, .) and the curl of X is the g-dual of dX^flat
through mu.  A Killing field B defines the magnetic form sigma = mu(B, ., .),
whose Lorentz force is Yv = B x v.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import MetricField, TwoFormField, fd_gradient
from .connection import christoffel_array, ricci, riemann_tensor, sectional
from .errors import DimensionError, NotKilling, NotOrthonormal, NotStatic
from .geometries import s3_frame_chart
from .magnetic import MagneticSystem

KILLING_TOL = 1e-6
STATIC_TOL = 1e-6

_EPS = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_a, _b, _c] = 1.0
    _EPS[_a, _c, _b] = -1.0


@dataclass(frozen=True)
class OrientedThreeManifold:
    system: MagneticSystem
    volume_sign: int = 1

    def __post_init__(self):
        if self.system.dim != 3:
            raise DimensionError(f"expected a 3-manifold, got dimension {self.system.dim}")
        if self.volume_sign not in (1, -1):
            raise ValueError("volume_sign must be +1 or -1")

    @property
    def g(self) -> MetricField:
        return self.system.g

    @property
    def patch(self):
        return self.system.patch

    def density(self, x) -> float:
        """sign * sqrt(det g) at x."""
        return self.volume_sign * float(np.sqrt(np.linalg.det(self.g(x))))

    def mu(self, x, a, b, c) -> float:
        return self.density(x) * float(np.linalg.det(np.column_stack([a, b, c])))


def _vec(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"expected a 3-vector, got shape {v.shape}")
    return v


def cross(m: OrientedThreeManifold, x, v, w) -> np.ndarray:
    x = m.patch.check(x)
    return m.density(x) * np.linalg.solve(m.g(x), np.cross(_vec(v), _vec(w)))


def flat(m: OrientedThreeManifold, X: Callable):
    return lambda y: m.g(y) @ np.asarray(X(y), dtype=float)


def curl(m: OrientedThreeManifold, X: Callable, x) -> np.ndarray:
    """curl X at x from the exterior derivative of X^flat."""
    x = m.patch.check(x)
    d = fd_gradient(flat(m, X), x, m.patch.steps.step(1, x), m.patch.domain_radius)  # d[i, j] = d_i X_j
    dX = d - d.T
    return np.einsum("ljk,jk->l", _EPS, dX) / (2.0 * m.density(x))


def lie_bracket(m: OrientedThreeManifold, X: Callable, Y: Callable, x) -> np.ndarray:
    x = m.patch.check(x)
    h = m.patch.steps.step(1, x)
    r = m.patch.domain_radius
    dX = fd_gradient(X, x, h, r)
    dY = fd_gradient(Y, x, h, r)
    return np.asarray(X(x)) @ dY - np.asarray(Y(x)) @ dX


def covariant_jacobian(m: OrientedThreeManifold, X: Callable, x) -> np.ndarray:
    """``D[:, i] = nabla_{d_i} X``."""
    x = m.patch.check(x)
    dX = fd_gradient(X, x, m.patch.steps.step(1, x), m.patch.domain_radius)
    return dX.T + np.einsum("kij,j->ki", christoffel_array(m.g, x), np.asarray(X(x), dtype=float))


def s3_frame(x):
    """(E_i, E_j, E_k) at x in the stereographic S^3 chart."""
    E = s3_frame_chart(np.asarray(x, dtype=float))
    return E[0], E[1], E[2]


class KillingField:
    """A vector field B together with the Killing check L_B g = 0."""

    def __init__(self, B: Callable, name: str = ""):
        self.B = B
        self.name = name

    def __call__(self, x):
        return np.asarray(self.B(x), dtype=float)

    def killing_residual(self, m: OrientedThreeManifold, x) -> float:
        D = covariant_jacobian(m, self.B, x)
        GD = m.g(x) @ D
        return float(np.max(np.abs(GD + GD.T)))

    def check(self, m: OrientedThreeManifold, x, tol=KILLING_TOL):
        r = self.killing_residual(m, x)
        if r >= tol:
            raise NotKilling(f"Killing residual {r:g} at {x}")


def killing_form(m: OrientedThreeManifold, B: Callable) -> TwoFormField:
    """sigma = mu(B, ., .)."""
    return TwoFormField(m.patch, lambda y: m.density(y) * np.einsum("ljk,l->jk", _EPS, np.asarray(B(y), float)))


def killing_system(m: OrientedThreeManifold, B: Callable, name: str = "") -> MagneticSystem:
    return MagneticSystem(m.g, killing_form(m, B), m.system.recentering, name)


class _KillingPoint:
    def __init__(self, m, B, x, check=True):
        if not isinstance(B, KillingField):
            B = KillingField(B)
        self.x = x = m.patch.check(x)
        if check:
            B.check(m, x)
        self.m = m
        self.G = m.g(x)
        self.B = B(x)
        self.curlB = curl(m, B, x)

    def g(self, a, b):
        return float(a @ self.G @ b)

    def cross(self, a, b):
        return cross(self.m, self.x, a, b)


def _pair(G, v, w, orthonormal=False, tol=1e-8):
    v = _vec(v)
    w = _vec(w)
    gram = np.array([[v @ G @ v, v @ G @ w], [w @ G @ v, w @ G @ w]])
    bad = abs(gram[0, 0] - 1) > tol or abs(gram[0, 1]) > tol
    if orthonormal:
        bad = bad or abs(gram[1, 1] - 1) > tol
    if bad:
        raise NotOrthonormal(f"pair not admissible (Gram {gram.tolist()})")
    return v, w


def killing_A(m, B, s, x, v, w):
    """A(w) = -3/4 g(v, B x w) B x v - 1/4 g(B, w) P_{v^perp} B + 1/4 |B|^2 w."""
    k = _KillingPoint(m, B, x)
    v, w = _pair(k.G, v, w)
    b = k.B
    Pvperp_B = b - k.g(v, b) * v
    return (-0.75 * k.g(v, k.cross(b, w)) * k.cross(b, v)
            - 0.25 * k.g(b, w) * Pvperp_B + 0.25 * k.g(b, b) * w)


def killing_nablaY(m, B, s, x, v, w):
    """(nabla_w Y)(v) = 1/2 g(curl B, v) w."""
    k = _KillingPoint(m, B, x)
    return 0.5 * k.g(k.curlB, _vec(v)) * _vec(w)


def killing_Rs(m, B, s, x, v, w):
    """R_s(w) = s^2 R(w, v) v - s/2 g(curl B, v) w."""
    k = _KillingPoint(m, B, x)
    v, w = _pair(k.G, v, w)
    Rm = riemann_tensor(m.g, k.x)
    return s**2 * np.einsum("lkij,i,j,k->l", Rm, w, v, v) - 0.5 * s * k.g(k.curlB, v) * w


def killing_sec_closed(s, sec, curlB_v, B_vxw, B_v) -> float:
    """s^2 sec - s/2 g(curl B, v) + g(B, v x w)^2 + 1/4 g(B, v)^2 from its scalar ingredients."""
    return s**2 * sec - 0.5 * s * curlB_v + B_vxw**2 + 0.25 * B_v**2


def killing_ric_closed(s, ric, curlB_v, B_sq, B_v) -> float:
    """s^2 Ric - s g(curl B, v) + |B|^2 - 1/2 g(B, v)^2 from its scalar ingredients."""
    return s**2 * ric - s * curlB_v + B_sq - 0.5 * B_v**2


def killing_mag_sec(m, B, s, x, v, w, check=True) -> float:
    k = _KillingPoint(m, B, x, check)
    v, w = _pair(k.G, v, w, orthonormal=True)
    return killing_sec_closed(s, sectional(m.g, k.x, v, w), k.g(k.curlB, v),
                              k.g(k.B, k.cross(v, w)), k.g(k.B, v))


def killing_mag_ric(m, B, s, x, v, check=True) -> float:
    k = _KillingPoint(m, B, x, check)
    v = _vec(v)
    if abs(k.g(v, v) - 1.0) > 1e-8:
        raise NotOrthonormal("v must be a unit vector")
    return killing_ric_closed(s, ricci(m.g, k.x, v), k.g(k.curlB, v), k.g(k.B, k.B), k.g(k.B, v))


def killing_mag_ric_basis(m, B, s, x, v, w) -> float:
    """Ric_s(v) as sec_s(v, w) + sec_s(v, v x w) for any unit w orthogonal to v."""
    x = m.patch.check(x)
    return (killing_mag_sec(m, B, s, x, v, w)
            + killing_mag_sec(m, B, s, x, v, cross(m, x, v, w)))


def static_K(m, B, sub, s, u, v) -> float:
    """s-magnetic Gaussian curvature of an integral surface N of B^perp.

    ``sub`` is an :class:`~magnetik.submanifold.EmbeddedSubmanifold` of the
    ambient 3-manifold, ``u`` a point of N and ``v`` a unit tangent vector in
    N-coordinates.
    """
    from .submanifold import tangent_basis

    x = sub.point(u)
    k = _KillingPoint(m, B, x)
    if abs(k.g(k.curlB, k.B)) >= STATIC_TOL:
        raise NotStatic(f"g(curl B, B) = {k.g(k.curlB, k.B):g} at {x}")
    P = sub.inclusion.jacobian(sub.inclusion.check(u))
    if np.max(np.abs(P.T @ k.G @ k.B)) >= STATIC_TOL:
        raise NotStatic("B is not orthogonal to the surface")
    E = P @ tangent_basis(sub, u)
    sec = sectional(m.g, x, E[:, 0], E[:, 1])
    vM = P @ np.asarray(v, float)
    return s**2 * sec - 0.5 * s * k.g(k.curlB, vM) + k.g(k.B, k.B)
