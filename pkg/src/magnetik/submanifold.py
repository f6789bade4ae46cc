"""Embedded submanifolds N of a magnetic manifold M.

Conventions
-----------
* ``u`` is a point in N-coordinates and ``x = inclusion(u)`` the point in
  M-coordinates.
* Tangent vectors of N are passed as N-coordinate arrays (length n).
  Normal vectors are passed as M-component arrays (length m).
* Every returned vector is in M-components; tangent results are
  pushforwards.

Second fundamental form and Weingarten map follow the standard signs
nabla^M_X Y = nabla^N_X Y + II(X, Y) and nabla^M_X xi = -S_xi X + nabla^perp_X xi.

Residual functions evaluate both sides of an identity through separate
pipelines: the left side only from the ambient system (its curvature snapshot
on M), the right side from the induced system on N together with the
fundamental forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import MetricField, Patch, TwoFormField, gram_schmidt
from .connection import christoffel_array, directional, riemann_tensor
from .errors import GramSingular, MagnetikError, NotCodimensionOne, NotOrthogonal, NotOrthonormal, NotUnit
from .magnetic import MagneticCurvature, MagneticSystem, lorentz, nabla_lorentz_tensor

GRAM_COND_MAX = 1e12
INDUCED_LORENTZ_TOL = 1e-8


@dataclass(frozen=True)
class SplitVector:
    base: np.ndarray
    tan: np.ndarray
    nor: np.ndarray


class EmbeddedSubmanifold:
    """N given by an inclusion patch from N-coordinates into M-coordinates."""

    def __init__(self, ambient_system: MagneticSystem, inclusion: Patch, name: str = ""):
        if inclusion.ambient_dim != ambient_system.dim:
            raise ValueError("inclusion must land in the ambient chart")
        if inclusion.dim >= ambient_system.dim:
            raise ValueError("submanifold dimension must be below the ambient dimension")
        self.M = ambient_system
        self.inclusion = inclusion
        self.name = name
        self.N = MagneticSystem(MetricField.pullback(ambient_system.g, inclusion),
                                TwoFormField.pullback(ambient_system.sigma, inclusion),
                                name=f"{name}/induced")

    @property
    def n(self):
        return self.inclusion.dim

    @property
    def m(self):
        return self.M.dim

    @property
    def steps(self):
        return self.inclusion.steps

    def point(self, u):
        return np.asarray(self.inclusion.embed(self.inclusion.check(u)), dtype=float)

    def at(self, u) -> "_Point":
        return _Point(self, u)


class _Point:
    """Per-point data shared by the submanifold operators."""

    def __init__(self, sub: EmbeddedSubmanifold, u):
        self.sub = sub
        self.u = u = sub.inclusion.check(u)
        self.x = x = sub.point(u)
        self.P = sub.inclusion.jacobian(u)
        self.G = sub.M.g(x)
        K = self.P.T @ self.G @ self.P
        if np.linalg.cond(K) > GRAM_COND_MAX:
            raise GramSingular(f"tangent Gram matrix singular at {u}")
        self.Kinv = np.linalg.inv(K)
        self._gammaM = None
        self._YM = None
        self._H = None

    @property
    def H(self):
        if self._H is None:
            self._H = self.sub.inclusion.hessian(self.u)
        return self._H

    @property
    def gammaM(self):
        if self._gammaM is None:
            self._gammaM = christoffel_array(self.sub.M.g, self.x)
        return self._gammaM

    @property
    def YM(self):
        if self._YM is None:
            self._YM = lorentz(self.sub.M, self.x)
        return self._YM

    def push(self, a):
        return self.P @ a

    def tan_coords(self, z):
        return self.Kinv @ (self.P.T @ (self.G @ z))

    def tan(self, z):
        return self.P @ self.tan_coords(z)

    def nor(self, z):
        return z - self.tan(z)

    def g(self, a, b):
        return float(a @ self.G @ b)

    def norm(self, z):
        return float(np.sqrt(max(z @ self.G @ z, 0.0)))

    def gammaM_apply(self, A, B):
        return np.einsum("kij,i,j->k", self.gammaM, A, B)

    def II(self, a, b):
        acc = np.einsum("iab,a,b->i", self.H, a, b) + self.gammaM_apply(self.P @ a, self.P @ b)
        return self.nor(acc)

    def Yperp(self, a):
        return self.nor(self.YM @ (self.P @ a))

    def check_normal(self, xi, tol=1e-8):
        t = self.tan(xi)
        if self.norm(t) > tol * max(1.0, self.norm(xi)):
            raise NotOrthogonal("vector is not normal to the submanifold")


def _radius(sub):
    return sub.inclusion.domain_radius


def _nabla_perp_field(sub, field, u, a, h, pt=None):
    """Normal part of the ambient covariant derivative of an M-vector field along N."""
    pt = sub.at(u) if pt is None else pt
    d = directional(field, pt.u, a, h, _radius(sub))
    return pt.nor(d + pt.gammaM_apply(pt.P @ a, np.asarray(field(pt.u), dtype=float)))


def _projection_extension(sub, xi):
    """u' -> normal part at u' of the constant M-component vector xi."""
    return lambda up: sub.at(up).nor(xi)


# --- splitting --------------------------------------------------------------

def split(sub: EmbeddedSubmanifold, u, z) -> SplitVector:
    pt = sub.at(u)
    z = np.asarray(z, dtype=float)
    t = pt.tan(z)
    return SplitVector(pt.x, t, z - t)


def unit_normal(sub: EmbeddedSubmanifold, u, flip: bool = False):
    """Unit normal of a hypersurface, oriented so det[P | eta] > 0 (negated when ``flip``)."""
    if sub.m - sub.n != 1:
        raise NotCodimensionOne(f"codimension is {sub.m - sub.n}")
    pt = sub.at(u)
    covec = np.linalg.svd(pt.P.T)[2][-1]
    eta = np.linalg.solve(pt.G, covec)
    eta /= pt.norm(eta)
    if np.linalg.det(np.column_stack([pt.P, eta])) < 0:
        eta = -eta
    return -eta if flip else eta


def tangent_basis(sub: EmbeddedSubmanifold, u):
    """Orthonormal basis of T_uN (N-coordinates, columns) for the induced metric."""
    return gram_schmidt(sub.N.g, u, list(np.eye(sub.n))).matrix()


# --- fundamental forms ------------------------------------------------------

def second_fundamental_form(sub, u, v, w):
    return sub.at(u).II(np.asarray(v, float), np.asarray(w, float))


def _shape_coords(sub, u, xi, a, pt=None):
    pt = sub.at(u) if pt is None else pt
    xi = np.asarray(xi, dtype=float)
    a = np.asarray(a, dtype=float)
    ext = _projection_extension(sub, xi)
    d = directional(ext, pt.u, a, sub.steps.step(1, pt.u), _radius(sub))
    return -pt.tan_coords(d + pt.gammaM_apply(pt.P @ a, xi))


def shape_operator(sub, u, xi, v):
    """S_xi(v) = -(nabla^M_v Xi)^T for the projection extension Xi of xi."""
    pt = sub.at(u)
    pt.check_normal(np.asarray(xi, float))
    return pt.P @ _shape_coords(sub, u, xi, v, pt)


def normal_connection(sub, u, v, xi_field):
    """nabla^perp_v xi for a normal field ``xi_field(u') -> M-components``."""
    return _nabla_perp_field(sub, xi_field, u, np.asarray(v, float), sub.steps.step(1, u))


def normal_curvature(sub, u, a, b, xi):
    """R^perp(a, b) xi as the commutator of nabla^perp along constant N-coordinate fields."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    ext = _projection_extension(sub, np.asarray(xi, float))
    h = sub.steps.step(2, u)

    def along(c):
        return lambda up: _nabla_perp_field(sub, ext, up, c, h)

    return (_nabla_perp_field(sub, along(b), u, a, h)
            - _nabla_perp_field(sub, along(a), u, b, h))


def lorentz_split(sub, u, v, verify: bool = True):
    """(Y^N v, Y^perp v) from splitting Y^M v.

    With ``verify`` the tangent part is compared with the Lorentz force of
    the induced system on N.
    """
    pt = sub.at(u)
    v = np.asarray(v, float)
    z = pt.YM @ (pt.P @ v)
    t = pt.tan(z)
    if verify:
        mismatch = pt.norm(t - pt.P @ (lorentz(sub.N, u) @ v))
        if mismatch > INDUCED_LORENTZ_TOL * max(1.0, pt.norm(z)):
            raise MagnetikError(f"induced Lorentz force disagrees with projection by {mismatch:g}")
    return t, z - t


def induced_lorentz_mismatch(sub, u, v) -> float:
    pt = sub.at(u)
    v = np.asarray(v, float)
    return pt.norm(pt.tan(pt.YM @ (pt.P @ v)) - pt.P @ (lorentz(sub.N, u) @ v))


def _unit_N(sub, u, v):
    G = sub.N.g(u)
    nv = float(np.sqrt(v @ G @ v))
    if abs(nv - 1.0) > 1e-8:
        raise NotUnit(f"|v| = {nv!r} is not 1")


def mag_II(sub, s, u, v, w):
    """s-magnetic second fundamental form s^2 II(v, w) - s Y^perp(w)."""
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    _unit_N(sub, u, v)
    pt = sub.at(u)
    return s**2 * pt.II(v, w) - s * pt.Yperp(w)


def mag_shape(sub, s, u, v, xi):
    """s-magnetic shape operator s^2 S_xi(v) + s (Y^M xi)^T."""
    v = np.asarray(v, float)
    xi = np.asarray(xi, float)
    _unit_N(sub, u, v)
    pt = sub.at(u)
    return s**2 * (pt.P @ _shape_coords(sub, u, xi, v, pt)) + s * pt.tan(pt.YM @ xi)


def nabla_perp_Yperp(sub, u, v, w, extension=None):
    """(nabla^perp_v Y^perp)(w) = nabla^perp_v(Y^perp W) - Y^perp(nabla^N_v W).

    ``extension`` is an optional N-coordinate vector field callable W with
    W(u) = w; by default the constant-coefficient extension is used.
    """
    pt = sub.at(u)
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    W = (lambda up: w) if extension is None else extension
    field = lambda up: sub.at(up).Yperp(np.asarray(W(up), float))
    nabla_W = directional(W, pt.u, v, sub.steps.step(1, pt.u), _radius(sub)) if extension is not None else 0.0
    nabla_W = nabla_W + np.einsum("kij,i,j->k", christoffel_array(sub.N.g, pt.u), v, w)
    return _nabla_perp_field(sub, field, u, v, sub.steps.step(1, pt.u), pt) - pt.Yperp(nabla_W)


def nabla_perp_II(sub, u, z, v, w):
    """(nabla^perp_z II)(v, w) with the van der Waerden-Bortolotti connection."""
    pt = sub.at(u)
    z, v, w = (np.asarray(a, float) for a in (z, v, w))
    gN = christoffel_array(sub.N.g, pt.u)
    field = lambda up: sub.at(up).II(v, w)
    return (_nabla_perp_field(sub, field, u, z, sub.steps.step(2, pt.u), pt)
            - pt.II(np.einsum("kij,i,j->k", gN, z, v), w)
            - pt.II(v, np.einsum("kij,i,j->k", gN, z, w)))


def nabla_perp_magII(sub, s, u, z, v, w):
    """s^2 (nabla^perp_z II)(v, w) - s (nabla^perp_z Y^perp)(w)."""
    return s**2 * nabla_perp_II(sub, u, z, v, w) - s * nabla_perp_Yperp(sub, u, z, w)


# --- residuals --------------------------------------------------------------

def _pair(sub, u, v, w, orthonormal=False):
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    G = sub.N.g(u)
    if abs(np.sqrt(v @ G @ v) - 1.0) > 1e-8:
        raise NotUnit("v must be a unit tangent vector")
    if abs(v @ G @ w) > 1e-8 * max(1.0, np.sqrt(w @ G @ w)):
        raise NotOrthogonal("w must be orthogonal to v")
    if orthonormal and abs(np.sqrt(w @ G @ w) - 1.0) > 1e-8:
        raise NotOrthonormal("(v, w) must be orthonormal")
    return v, w


def residual_classical(sub, which, u, X, Y, Z, Rm_M=None):
    """|LHS - RHS| of the Gauss, Codazzi-Mainardi or Ricci equation.

    For ``which == "ricci"`` the last argument is a normal vector xi
    (M-components); otherwise it is a tangent vector.
    """
    pt = sub.at(u)
    X, Y, Z = (np.asarray(a, float) for a in (X, Y, Z))
    Rm_M = riemann_tensor(sub.M.g, pt.x) if Rm_M is None else Rm_M
    R = lambda a, b, c: np.einsum("lkij,i,j,k->l", Rm_M, a, b, c)
    if which == "gauss":
        lhs = pt.tan(R(pt.P @ X, pt.P @ Y, pt.P @ Z))
        RmN = riemann_tensor(sub.N.g, pt.u)
        rhs = (pt.P @ np.einsum("lkij,i,j,k->l", RmN, X, Y, Z)
               - pt.P @ _shape_coords(sub, u, pt.II(Y, Z), X, pt)
               + pt.P @ _shape_coords(sub, u, pt.II(X, Z), Y, pt))
    elif which == "codazzi":
        lhs = pt.nor(R(pt.P @ X, pt.P @ Y, pt.P @ Z))
        rhs = nabla_perp_II(sub, u, X, Y, Z) - nabla_perp_II(sub, u, Y, X, Z)
    elif which == "ricci":
        xi = Z
        pt.check_normal(xi)
        lhs = pt.nor(R(pt.P @ X, pt.P @ Y, xi))
        rhs = (normal_curvature(sub, u, X, Y, xi)
               + pt.II(_shape_coords(sub, u, xi, X, pt), Y)
               - pt.II(X, _shape_coords(sub, u, xi, Y, pt)))
    else:
        raise ValueError(f"unknown classical equation {which!r}")
    return pt.norm(lhs - rhs)


def _curvatures(sub, u, curv_M, curv_N):
    if curv_M is None:
        curv_M = MagneticCurvature(sub.M, sub.point(u))
    if curv_N is None:
        curv_N = MagneticCurvature(sub.N, u)
    return curv_M, curv_N


def residual_lemma_nablaY(sub, u, v, w):
    """Tangent and normal residuals of the decomposition of (nabla^M_v Y^M)(w)."""
    pt = sub.at(u)
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    DYM = nabla_lorentz_tensor(sub.M, pt.x)
    lhs = np.einsum("i,ikj,j->k", pt.P @ v, DYM, pt.P @ w)
    DYN = nabla_lorentz_tensor(sub.N, u)
    YN_w = lorentz(sub.N, u) @ w
    II_vw = pt.II(v, w)
    Y_II = pt.YM @ II_vw
    rhs_tan = (pt.P @ np.einsum("i,ikj,j->k", v, DYN, w)
               - pt.P @ _shape_coords(sub, u, pt.Yperp(w), v, pt)
               - pt.tan(Y_II))
    rhs_nor = nabla_perp_Yperp(sub, u, v, w) + pt.II(v, YN_w) - pt.nor(Y_II)
    return pt.norm(pt.tan(lhs) - rhs_tan), pt.norm(pt.nor(lhs) - rhs_nor)


def _A_rhs(sub, pt, v, w):
    YN = lorentz(sub.N, pt.u)
    GN = sub.N.g(pt.u)
    Yp_w = pt.Yperp(w)
    YYp = pt.YM @ Yp_w
    YN_w = YN @ w
    Pv_YNw = (v @ GN @ YN_w) * v
    vM = pt.P @ v
    Pvperp = lambda z: z - pt.g(vM, z) * vM
    tan_extra = -0.25 * pt.tan(Pvperp(YYp))
    nor = -0.75 * pt.Yperp(Pv_YNw) - 0.25 * pt.Yperp(YN_w) - 0.25 * pt.nor(YYp)
    return tan_extra, nor


def _Rs_rhs(sub, pt, s, v, w):
    u = pt.u
    YN = lorentz(sub.N, u)
    vM = pt.P @ v
    Pvperp = lambda z: z - pt.g(vM, z) * vM
    II_vw = pt.II(v, w)
    magII_vv = s**2 * pt.II(v, v) - s * pt.Yperp(v)
    S = lambda xi, a: pt.P @ _shape_coords(sub, u, xi, a, pt)
    mag_shape_v = lambda xi: s**2 * S(xi, v) + s * pt.tan(pt.YM @ xi)
    tan_extra = (-S(magII_vv, w) + mag_shape_v(II_vw)
                 - 0.5 * s * Pvperp(S(pt.Yperp(w), v) + pt.tan(pt.YM @ II_vw)))
    nor = (nabla_perp_magII(sub, s, u, w, v, v) - nabla_perp_magII(sub, s, u, v, v, w)
           - 0.5 * s * nabla_perp_Yperp(sub, u, v, w)
           - s * pt.II(w, YN @ v) + 0.5 * s * pt.nor(pt.YM @ II_vw)
           + 0.5 * s * pt.II(v, YN @ w))
    return tan_extra, nor


def residual_prop_A(sub, u, v, w, curv_M=None, curv_N=None):
    v, w = _pair(sub, u, v, w)
    curv_M, curv_N = _curvatures(sub, u, curv_M, curv_N)
    pt = sub.at(u)
    lhs = curv_M.A(pt.P @ v, pt.P @ w)
    tan_extra, nor = _A_rhs(sub, pt, v, w)
    rhs_tan = pt.P @ curv_N.A(v, w) + tan_extra
    return pt.norm(pt.tan(lhs) - rhs_tan), pt.norm(pt.nor(lhs) - nor)


def residual_prop_Rs(sub, s, u, v, w, curv_M=None, curv_N=None):
    v, w = _pair(sub, u, v, w)
    curv_M, curv_N = _curvatures(sub, u, curv_M, curv_N)
    pt = sub.at(u)
    lhs = curv_M.R_s(s, pt.P @ v, pt.P @ w)
    tan_extra, nor = _Rs_rhs(sub, pt, s, v, w)
    rhs_tan = pt.P @ curv_N.R_s(s, v, w) + tan_extra
    return pt.norm(pt.tan(lhs) - rhs_tan), pt.norm(pt.nor(lhs) - nor)


def theorem_A_sides(sub, s, u, v, w, curv_M=None, curv_N=None):
    """((lhs_tan, lhs_nor), (rhs_tan, rhs_nor)) of the magnetic Gauss/Codazzi decomposition."""
    v, w = _pair(sub, u, v, w)
    curv_M, curv_N = _curvatures(sub, u, curv_M, curv_N)
    pt = sub.at(u)
    lhs = curv_M.M_s(s, pt.P @ v, pt.P @ w)
    a_tan, a_nor = _A_rhs(sub, pt, v, w)
    r_tan, r_nor = _Rs_rhs(sub, pt, s, v, w)
    rhs_tan = pt.P @ curv_N.M_s(s, v, w) + a_tan + r_tan
    return (pt.tan(lhs), pt.nor(lhs)), (rhs_tan, a_nor + r_nor)


def residual_theoremA(sub, s, u, v, w, curv_M=None, curv_N=None):
    (lt, ln), (rt, rn) = theorem_A_sides(sub, s, u, v, w, curv_M, curv_N)
    pt = sub.at(u)
    return pt.norm(lt - rt), pt.norm(ln - rn)


def residual_corollaryB(sub, s, u, v, w, curv_M=None, curv_N=None):
    v, w = _pair(sub, u, v, w, orthonormal=True)
    curv_M, curv_N = _curvatures(sub, u, curv_M, curv_N)
    pt = sub.at(u)
    lhs = curv_M.sec(s, pt.P @ v, pt.P @ w)
    Yp_w = pt.Yperp(w)
    rhs = (curv_N.sec(s, v, w)
           - pt.g(s**2 * pt.II(v, v) - s * pt.Yperp(v), pt.II(w, w))
           + pt.g(pt.II(v, w), s**2 * pt.II(v, w) - s * Yp_w)
           + 0.25 * pt.g(Yp_w, Yp_w))
    return abs(lhs - rhs)


def residual_corollaryC(sub, s, u, v, w, flip=False, curv_M=None, curv_N=None):
    """Residuals of the hypersurface sectional (i) and Ricci (ii) relations."""
    v, w = _pair(sub, u, v, w, orthonormal=True)
    eta = unit_normal(sub, u, flip)
    curv_M, curv_N = _curvatures(sub, u, curv_M, curv_N)
    pt = sub.at(u)
    S_eta = lambda a: pt.P @ _shape_coords(sub, u, eta, a, pt)
    Ss_eta = s**2 * S_eta(v) + s * pt.tan(pt.YM @ eta)
    theta = lambda a: pt.g(pt.Yperp(a), eta)
    vM, wM = pt.P @ v, pt.P @ w
    det = pt.g(Ss_eta, vM) * pt.g(S_eta(w), wM) - pt.g(S_eta(v), wM) * pt.g(Ss_eta, wM)
    res_i = abs(curv_N.sec(s, v, w) - (curv_M.sec(s, vM, wM) + det - 0.25 * theta(w) ** 2))

    basis = tangent_basis(sub, u)
    trace = sum(pt.g(S_eta(e), pt.P @ e) for e in basis.T)
    E = curv_N.complement(v)
    theta_sq = sum(theta(e) ** 2 for e in E.T)
    rhs_ii = (curv_M.ric(s, vM) - curv_M.sec(s, vM, eta)
              + trace * pt.g(Ss_eta, vM) - pt.g(Ss_eta, S_eta(v)) - 0.25 * theta_sq)
    res_ii = abs(curv_N.ric(s, v) - rhs_ii)
    return res_i, res_ii


def projector_residuals(sub, u, v, z):
    """Residuals of the four projector identities for unit tangent v and ambient z."""
    pt = sub.at(u)
    v = np.asarray(v, float)
    z = np.asarray(z, float)
    vM = pt.P @ v
    Pv = lambda q: pt.g(vM, q) * vM
    Pvperp = lambda q: q - Pv(q)
    zt, zn = pt.tan(z), pt.nor(z)
    r1 = pt.norm(Pvperp(zn) - zn)
    r2 = pt.norm(Pvperp(zt) - pt.tan(Pvperp(z)))
    YN = lorentz(sub.N, u)
    r3 = max(pt.norm(Pv(pt.YM @ (pt.P @ a)) - Pv(pt.P @ (YN @ a))) for a in np.eye(sub.n))
    r4 = max(pt.norm(Pv(pt.Yperp(a))) for a in np.eye(sub.n))
    return r1, r2, r3, r4
