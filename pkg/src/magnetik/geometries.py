"""Built-in patches, magnetic systems and submanifold test geometries.

Spheres use stereographic projection from the point (-1, 0, ..., 0), so the
chart origin maps to (1, 0, ..., 0) and the height coordinate comes first:

    u  ->  ((1 - |u|^2) / (1 + |u|^2),  2u / (1 + |u|^2)).

On S^3 the quaternionic frame E_i, E_j, E_k (left multiplication by i, j, k)
is pulled back through the exact inverse differential of this chart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import DEFAULT_STEPS, FDSteps, MetricField, Patch, TwoFormField
from .magnetic import MagneticSystem

EUCLIDEAN_RADIUS = 10.0
SPHERE_RADIUS = 2.0
S3_RECENTER_RADIUS = 1.0


def euclidean_patch(n: int, steps: FDSteps = DEFAULT_STEPS, radius: float = EUCLIDEAN_RADIUS) -> Patch:
    eye = np.eye(n)
    zero = np.zeros((n, n, n))
    return Patch(n, n, lambda x: np.asarray(x, dtype=float), lambda x: eye, lambda x: zero,
                 radius, f"euclidean{n}", steps)


def plane_patch(steps: FDSteps = DEFAULT_STEPS, radius: float = EUCLIDEAN_RADIUS) -> Patch:
    """The plane {z = 0} in R^3 with coordinates (x, y)."""
    J = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    zero = np.zeros((3, 2, 2))
    return Patch(2, 3, lambda u: np.array([u[0], u[1], 0.0]), lambda u: J, lambda u: zero,
                 radius, "plane-in-r3", steps)


def _stereo(u):
    u = np.asarray(u, dtype=float)
    D = 1.0 + u @ u
    return np.concatenate([[(1.0 - u @ u) / D], 2.0 * u / D])


def _stereo_jac(u):
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    D = 1.0 + u @ u
    J = np.empty((n + 1, n))
    J[0] = -4.0 * u / D**2
    J[1:] = 2.0 * np.eye(n) / D - 4.0 * np.outer(u, u) / D**2
    return J


def _stereo_hess(u):
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    D = 1.0 + u @ u
    I = np.eye(n)
    uuu = np.einsum("i,j,k->ijk", u, u, u)
    H = np.empty((n + 1, n, n))
    H[0] = -4.0 * I / D**2 + 16.0 * np.outer(u, u) / D**3
    # d_j d_k (2 u_i / D)
    H[1:] = (-4.0 * (np.einsum("ij,k->ijk", I, u) + np.einsum("ik,j->ijk", I, u)
                     + np.einsum("jk,i->ijk", I, u)) / D**2 + 16.0 * uuu / D**3)
    return H


def sphere_patch(n: int, steps: FDSteps = DEFAULT_STEPS, radius: float = SPHERE_RADIUS) -> Patch:
    """Unit S^n in R^(n+1) through stereographic coordinates."""
    return Patch(n, n + 1, _stereo, _stereo_jac, _stereo_hess, radius, f"s{n}-stereo", steps)


def conformal_sphere_metric(patch: Patch) -> MetricField:
    """The round metric written directly as 4 / (1 + |u|^2)^2 times the identity."""
    n = patch.dim

    def g(u):
        return 4.0 / (1.0 + u @ u) ** 2 * np.eye(n)

    def dg(u):
        return -16.0 / (1.0 + u @ u) ** 3 * np.einsum("k,ij->kij", u, np.eye(n))

    return MetricField(patch, g, "explicit", dg)


# --- quaternions and the S^3 frame -----------------------------------------

def qmul(p, q):
    a0, a1, a2, a3 = p
    b0, b1, b2, b3 = q
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def qconj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def s3_frame_ambient(p):
    """E_i, E_j, E_k at p in R^4 as rows."""
    x0, x1, x2, x3 = p
    return np.array([
        [-x1, x0, -x3, x2],
        [-x2, x3, x0, -x1],
        [-x3, -x2, x1, x0],
    ])


def stereo_inverse(p):
    p = np.asarray(p, dtype=float)
    return p[1:] / (1.0 + p[0])


def stereo_pullback(u, V):
    """Chart components of the ambient tangent vector(s) V (last axis) at stereo(u)."""
    u = np.asarray(u, dtype=float)
    V = np.asarray(V, dtype=float)
    D = 1.0 + u @ u
    return 0.5 * D * (V[..., 1:] - V[..., :1] * u)


def s3_frame_chart(u):
    """(3, 3) array whose rows are the chart components of E_i, E_j, E_k at u."""
    return stereo_pullback(u, s3_frame_ambient(_stereo(u)))


def s3_frame_field(which: str):
    idx = "ijk".index(which)
    return lambda u: s3_frame_chart(u)[idx]


def s3_coframe(metric: MetricField, u):
    """Rows theta^i, theta^j, theta^k as covectors: theta^a = g(E_a, .)."""
    return s3_frame_chart(u) @ metric(u)


@dataclass(frozen=True)
class S3Recentering:
    """Chart changes x -> stereo(u) * q by right quaternion multiplication.

    Right multiplications are isometries of the round metric that preserve
    E_i, E_j, E_k; every S^3 system in the catalog is invariant under them,
    so the coordinate expression of the system is the same in every chart.
    """

    patch: Patch
    threshold: float = S3_RECENTER_RADIUS

    identity = (1.0, 0.0, 0.0, 0.0)

    def needs(self, x) -> bool:
        return float(np.linalg.norm(x)) > self.threshold

    def ambient(self, x, chart):
        return qmul(_stereo(x), np.asarray(chart, dtype=float))

    def recenter(self, x, v, chart):
        """Move to the chart centred at the current point; returns (x, v, chart, drift)."""
        q = np.asarray(chart, dtype=float)
        p = self.ambient(x, q)
        drift = abs(float(np.linalg.norm(p)) - 1.0)
        p = p / np.linalg.norm(p)
        V = qmul(_stereo_jac(x) @ v, q)
        V_at_one = qmul(V, qconj(p))
        x_new = np.zeros(3)
        v_new = stereo_pullback(x_new, V_at_one)
        return x_new, v_new, tuple(p), drift


# --- magnetic systems ------------------------------------------------------

def _flat_uniform_form(B):
    B = np.asarray(B, dtype=float)
    if B.shape == (3,):
        return np.array([[0.0, B[2], -B[1]], [-B[2], 0.0, B[0]], [B[1], -B[0], 0.0]])
    raise ValueError("uniform field needs three components")


def flat_uniform_system(B=(0.0, 0.0, 1.0), steps: FDSteps = DEFAULT_STEPS, name="") -> MagneticSystem:
    """R^3 with sigma = iota_B (dx^dy^dz) for a constant vector B."""
    patch = euclidean_patch(3, steps)
    return MagneticSystem(MetricField.euclidean(patch), TwoFormField.constant(patch, _flat_uniform_form(B)),
                          name=name or f"euclidean3-B{tuple(B)}")


def flat_plane_system(b: float = 1.0, steps: FDSteps = DEFAULT_STEPS) -> MagneticSystem:
    """R^2 with sigma = b dx^dy."""
    patch = euclidean_patch(2, steps)
    return MagneticSystem(MetricField.euclidean(patch), TwoFormField.constant(patch, [[0.0, b], [-b, 0.0]]),
                          name=f"euclidean2-b{b:g}")


def s3_sigma(metric: MetricField, which: str = "i", scale: float = 1.0) -> TwoFormField:
    """sigma^a = theta^b ^ theta^c for (a, b, c) a cyclic permutation of (i, j, k)."""
    a = "ijk".index(which)
    b, c = (a + 1) % 3, (a + 2) % 3

    def form(u):
        th = s3_coframe(metric, u)
        return scale * (np.outer(th[b], th[c]) - np.outer(th[c], th[b]))

    return TwoFormField(metric.patch, form)


def s3_system(sigma: str | None = "i", scale: float = 1.0, steps: FDSteps = DEFAULT_STEPS) -> MagneticSystem:
    patch = sphere_patch(3, steps)
    g = MetricField.induced(patch)
    form = TwoFormField.zero(patch) if sigma is None else s3_sigma(g, sigma, scale)
    name = "s3-stereo" if sigma is None else f"s3-{'' if scale == 1 else f'{scale:g}'}sigma{sigma}"
    return MagneticSystem(g, form, S3Recentering(patch), name)


SYSTEMS = {
    "euclidean2-uniform": lambda steps=DEFAULT_STEPS: flat_plane_system(1.0, steps),
    "euclidean3": lambda steps=DEFAULT_STEPS: flat_uniform_system((0.0, 0.0, 0.0), steps, "euclidean3"),
    "euclidean3-uniform": lambda steps=DEFAULT_STEPS: flat_uniform_system((0.0, 0.0, 1.0), steps, "euclidean3-uniform"),
    "euclidean3-static": lambda steps=DEFAULT_STEPS: flat_uniform_system((0.0, 0.0, 0.7), steps, "euclidean3-static"),
    "s3-stereo": lambda steps=DEFAULT_STEPS: s3_system(None, steps=steps),
    "s3-sigmai": lambda steps=DEFAULT_STEPS: s3_system("i", steps=steps),
    "s3-2sigmai": lambda steps=DEFAULT_STEPS: s3_system("i", 2.0, steps),
}

PATCHES = {
    "euclidean3": lambda steps=DEFAULT_STEPS: euclidean_patch(3, steps),
    "euclidean4": lambda steps=DEFAULT_STEPS: euclidean_patch(4, steps),
    "s2-stereo": lambda steps=DEFAULT_STEPS: sphere_patch(2, steps),
    "s3-stereo": lambda steps=DEFAULT_STEPS: sphere_patch(3, steps),
    "plane-in-r3": lambda steps=DEFAULT_STEPS: plane_patch(steps),
}


def patch(key: str, steps: FDSteps = DEFAULT_STEPS) -> Patch:
    try:
        return PATCHES[key](steps)
    except KeyError:
        raise KeyError(f"unknown patch {key!r}; choose from {sorted(PATCHES)}") from None


def system(key: str, steps: FDSteps = DEFAULT_STEPS) -> MagneticSystem:
    try:
        return SYSTEMS[key](steps)
    except KeyError:
        raise KeyError(f"unknown system {key!r}; choose from {sorted(SYSTEMS)}") from None


# --- submanifold test geometries --------------------------------------------

def _great_s2_inclusion(steps):
    J = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    zero = np.zeros((3, 2, 2))
    return Patch(2, 3, lambda u: np.array([u[0], u[1], 0.0]), lambda u: J, lambda u: zero,
                 SPHERE_RADIUS, "greats2", steps)


def _s2_inclusion(steps):
    return sphere_patch(2, steps)


def _plane_inclusion(steps):
    return plane_patch(steps)


def submanifold(key: str, steps: FDSteps = DEFAULT_STEPS, raw: bool = False):
    """Submanifold test geometry by key.

    ``raw`` drops the inclusion's analytic derivatives so that its second
    partials come from second differences with step h2.
    """
    from .submanifold import EmbeddedSubmanifold

    builders = {
        "s2-in-r3-uniform": (lambda: flat_uniform_system((0.0, 0.0, 1.0), steps, "euclidean3-uniform"), _s2_inclusion),
        "s2-in-r3-zero": (lambda: flat_uniform_system((0.0, 0.0, 0.0), steps, "euclidean3"), _s2_inclusion),
        "plane-in-r3-static": (lambda: flat_uniform_system((0.0, 0.0, 0.7), steps, "euclidean3-static"), _plane_inclusion),
        "plane-in-r3-zero": (lambda: flat_uniform_system((0.0, 0.0, 0.0), steps, "euclidean3"), _plane_inclusion),
        "greats2-in-s3-sigmai": (lambda: s3_system("i", steps=steps), _great_s2_inclusion),
        "greats2-in-s3-zero": (lambda: s3_system(None, steps=steps), _great_s2_inclusion),
    }
    try:
        make_system, make_inclusion = builders[key]
    except KeyError:
        raise KeyError(f"unknown submanifold geometry {key!r}; choose from {sorted(builders)}") from None
    inclusion = make_inclusion(steps)
    if raw:
        inclusion = inclusion.raw()
    return EmbeddedSubmanifold(make_system(), inclusion, name=key)


SUBMANIFOLDS = ("s2-in-r3-uniform", "plane-in-r3-static", "greats2-in-s3-sigmai")
