"""Lorentz force operator and the s-magnetic curvature objects.

For a magnetic system (g, sigma) the Lorentz force Y is the g-skew
endomorphism with g(Yv, w) = sigma(v, w).  On a unit vector v and w in v^perp:

    A(w)   = -3/4 Y(P_v(Y w)) - 1/4 P_{v^perp}(Y^2 w)
    R_s(w) = s^2 R(w, v) v - s (nabla_w Y)(v) + s/2 P_{v^perp}((nabla_v Y)(w))
    M_s    = R_s + A,   sec_s(v, w) = g(M_s w, w),   Ric_s(v) = tr M_s|_{v^perp}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .chart import (
    MetricField,
    TwoFormField,
    UNIT_TOL,
    comps,
    orthonormal_complement,
)
from .connection import christoffel_array, christoffel_derivative, covariant_derivative, riemann_from
from .errors import MetricSingular, NotOrthogonal, NotOrthonormal, NotUnit

ORTHO_REPAIR_TOL = 1e-6


@dataclass(frozen=True)
class EnergyLevel:
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("energy parameter s must be positive")


class MagneticSystem:
    """A metric and a closed 2-form on the same patch.

    ``recentering`` is an optional chart-change hook used by the integrator
    when a trajectory approaches the edge of the chart (see
    :mod:`magnetik.geometries`); it is only valid for systems invariant under
    the corresponding change of chart.
    """

    def __init__(self, g: MetricField, sigma: TwoFormField, recentering: Optional[Any] = None, name: str = ""):
        if g.patch.dim != sigma.patch.dim:
            raise ValueError("metric and magnetic form live on different patches")
        self.g = g
        self.sigma = sigma
        self.recentering = recentering
        self.name = name

    @property
    def patch(self):
        return self.g.patch

    @property
    def dim(self):
        return self.g.patch.dim

    def closedness_residual(self, x) -> float:
        return self.sigma.closedness_residual(x)

    def scaled(self, factor: float) -> "MagneticSystem":
        sig = self.sigma
        form = TwoFormField(sig.patch, lambda x: factor * sig(x), lambda x: factor * sig.derivative(x))
        return MagneticSystem(self.g, form, self.recentering, f"{factor:g}*{self.name}")


def lorentz(system: MagneticSystem, x) -> np.ndarray:
    """Y(x) as a matrix acting on components: g(Yv, w) = sigma(v, w)."""
    x = system.patch.check(x)
    G = system.g(x)
    try:
        return -np.linalg.solve(G, system.sigma(x))
    except np.linalg.LinAlgError as exc:
        raise MetricSingular(f"metric singular at {x}") from exc


def lorentz_partials(system: MagneticSystem, x) -> np.ndarray:
    """``dY[i] = d_i Y`` from the metric and 2-form derivatives."""
    x = system.patch.check(x)
    Ginv = system.g.inverse(x)
    S = system.sigma(x)
    dG = system.g.derivative(x)
    dS = system.sigma.derivative(x)
    return (np.einsum("ab,ibc,cd,de->iae", Ginv, dG, Ginv, S)
            - np.einsum("ab,ibc->iac", Ginv, dS))


def nabla_lorentz_tensor(system: MagneticSystem, x) -> np.ndarray:
    """``DY[i] = nabla_{d_i} Y`` as matrices."""
    x = system.patch.check(x)
    Y = lorentz(system, x)
    gamma = christoffel_array(system.g, x)
    return (lorentz_partials(system, x)
            + np.einsum("kil,lj->ikj", gamma, Y)
            - np.einsum("kl,lij->ikj", Y, gamma))


def nabla_lorentz(system: MagneticSystem, x, u, w, extension=None):
    """(nabla_u Y)(w).

    With ``extension`` (a vector field callable with ``extension(x) == w``)
    this is evaluated as nabla_u(Y W) - Y(nabla_u W); otherwise from the
    tensor :func:`nabla_lorentz_tensor`.  Both agree because the result is
    tensorial in w.
    """
    x = system.patch.check(x)
    u, w = comps(u, x), comps(w, x)
    if extension is None:
        return np.einsum("i,ikj,j->k", u, nabla_lorentz_tensor(system, x), w)
    YW = lambda y: lorentz(system, y) @ np.asarray(extension(y), dtype=float)
    g = system.g
    return covariant_derivative(g, YW, u, x) - lorentz(system, x) @ covariant_derivative(g, extension, u, x)


def _unit(G, v, what="v"):
    nv = np.sqrt(v @ G @ v)
    if abs(nv - 1.0) > UNIT_TOL:
        raise NotUnit(f"|{what}|_g = {nv!r} is not 1")


def _in_vperp(G, v, w):
    """Return w, projected onto v^perp when it drifts slightly off it."""
    c = v @ G @ w
    nw = np.sqrt(max(w @ G @ w, 0.0))
    if nw == 0.0 or abs(c) <= 1e-13 * max(nw, 1.0):
        return w
    if abs(c) / nw > ORTHO_REPAIR_TOL:
        raise NotOrthogonal(f"g(v, w) = {c:g} is not zero")
    p = w - c * v
    return p * (nw / np.sqrt(p @ G @ p))


class MagneticCurvature:
    """All pointwise curvature data of a magnetic system at one point.

    Building the snapshot costs one Riemann tensor and one derivative of Y;
    every operator below is then pure linear algebra, which is what makes
    large sweeps over (v, w) at a fixed point cheap.
    """

    def __init__(self, system: MagneticSystem, x):
        self.system = system
        self.x = x = system.patch.check(x)
        g = system.g
        self.G = g(x)
        self.gamma = christoffel_array(g, x)
        self.Rm = riemann_from(self.gamma, christoffel_derivative(g, x))
        self.Y = lorentz(system, x)
        self.DY = (lorentz_partials(system, x)
                   + np.einsum("kil,lj->ikj", self.gamma, self.Y)
                   - np.einsum("kl,lij->ikj", self.Y, self.gamma))

    def g(self, a, b):
        return float(a @ self.G @ b)

    def P_v(self, v, z):
        return (v @ self.G @ z) * v

    def P_vperp(self, v, z):
        return z - (v @ self.G @ z) * v

    def R(self, w, v, z):
        return np.einsum("lkij,i,j,k->l", self.Rm, w, v, z)

    def nablaY(self, u, w):
        """(nabla_u Y)(w)."""
        return np.einsum("i,ikj,j->k", u, self.DY, w)

    def _pair(self, v, w):
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        _unit(self.G, v)
        return v, _in_vperp(self.G, v, w)

    def A(self, v, w):
        v, w = self._pair(v, w)
        Y = self.Y
        return -0.75 * Y @ self.P_v(v, Y @ w) - 0.25 * self.P_vperp(v, Y @ (Y @ w))

    def R_s(self, s, v, w):
        v, w = self._pair(v, w)
        return (s**2 * self.R(w, v, v) - s * self.nablaY(w, v)
                + 0.5 * s * self.P_vperp(v, self.nablaY(v, w)))

    def M_s(self, s, v, w):
        return self.R_s(s, v, w) + self.A(v, w)

    def sec(self, s, v, w):
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        G = self.G
        gram = np.array([[v @ G @ v, v @ G @ w], [w @ G @ v, w @ G @ w]])
        off = np.max(np.abs(gram - np.eye(2)))
        if off > ORTHO_REPAIR_TOL:
            raise NotOrthonormal(f"(v, w) not g-orthonormal (Gram {gram.tolist()})")
        _unit(self.G, v)
        w = _in_vperp(G, v, w)
        w = w / np.sqrt(w @ G @ w)
        return self.g(self.M_s(s, v, w), w)

    def complement(self, v):
        return orthonormal_complement(self.system.g, self.x, v)

    def ric(self, s, v, basis=None):
        v = np.asarray(v, dtype=float)
        _unit(self.G, v)
        E = self.complement(v) if basis is None else basis
        return float(sum(self.g(self.M_s(s, v, e), e) for e in E.T))

    def tidal(self, v, w):
        return self.R(w, v, v)


def _s_ok(s):
    if s < 0:
        raise ValueError("energy parameter s must be non-negative")
    return float(s)


def a_operator(system, x, v, w):
    return MagneticCurvature(system, x).A(comps(v, x), comps(w, x))


def r_s_operator(system, s, x, v, w):
    return MagneticCurvature(system, x).R_s(_s_ok(s), comps(v, x), comps(w, x))


def m_s_operator(system, s, x, v, w):
    return MagneticCurvature(system, x).M_s(_s_ok(s), comps(v, x), comps(w, x))


def mag_sec(system, s, x, v, w) -> float:
    return MagneticCurvature(system, x).sec(_s_ok(s), comps(v, x), comps(w, x))


def mag_ric(system, s, x, v) -> float:
    return MagneticCurvature(system, x).ric(_s_ok(s), comps(v, x))


def skewness_residual(system, x) -> float:
    """max |g(Yv, w) + g(v, Yw)| over coordinate vectors."""
    G = system.g(system.patch.check(x))
    GY = G @ lorentz(system, x)
    return float(np.max(np.abs(GY + GY.T)))
