"""Coordinate patches, fields on them, the finite-difference engine and
orthonormal frames.

Every manifold in the engine is a single coordinate patch together with a
smooth map into a Euclidean space.  Points and tangent vectors are plain
coordinate component arrays; :class:`TangentVector` and :class:`FramePoint`
exist for callers that want the base point carried along and checked.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    BaseMismatch,
    DegenerateFrame,
    DomainError,
    MetricSingular,
    NotOrthonormal,
    NotUnit,
)

UNIT_TOL = 1e-8
FRAME_TOL = 1e-10
FRAME_DRIFT_TOL = 1e-6
PIVOT_TOL = 1e-10
DEFAULT_SEED = 42


@dataclass(frozen=True)
class FDSteps:
    """Central-difference step sizes.

    ``h1`` differentiates analytic data (embeddings, metric and two-form
    callbacks, vector fields).  ``h2`` is used wherever the result is a
    second-derivative quantity: second differences of raw embeddings and
    derivatives of connection-level objects (Christoffel symbols, second
    fundamental forms).  Both are scaled by ``max(1, |x|)``.
    """

    h1: float = 1e-6
    h2: float = 1e-4

    def step(self, order: int, x) -> float:
        base = self.h1 if order == 1 else self.h2
        return base * max(1.0, float(np.linalg.norm(x)))


DEFAULT_STEPS = FDSteps()


def _check_stencil(x, offsets, radius):
    if radius is None or not np.isfinite(radius):
        return
    for dx in offsets:
        if np.linalg.norm(x + dx) > radius * (1 + 1e-12):
            raise DomainError(f"stencil point {x + dx} outside chart ball of radius {radius}")


def fd_partial(fn, x, i, order=1, h=None, analytic=None, radius=None, steps=DEFAULT_STEPS):
    """Central difference of ``fn`` along coordinate ``i``.

    ``order`` 1 is the first derivative, ``order`` 2 the pure second
    derivative.  When ``analytic`` is given it is called as
    ``analytic(x, i)`` and returned instead.
    """
    x = np.asarray(x, dtype=float)
    if radius is not None and np.linalg.norm(x) > radius:
        raise DomainError(f"point {x} outside chart ball of radius {radius}")
    if analytic is not None:
        return analytic(x, i)
    if h is None:
        h = steps.step(order, x)
    e = np.zeros_like(x)
    e[i] = h
    _check_stencil(x, (e, -e), radius)
    if order == 1:
        return (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h)
    if order == 2:
        return (np.asarray(fn(x + e)) - 2 * np.asarray(fn(x)) + np.asarray(fn(x - e))) / h**2
    raise ValueError("order must be 1 or 2")


def fd_gradient(fn, x, h, radius=None):
    """All first partials, stacked on a new leading axis: ``out[k] = d_k fn``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    eye = np.eye(n) * h
    _check_stencil(x, list(eye) + list(-eye), radius)
    return np.stack([(np.asarray(fn(x + eye[k])) - np.asarray(fn(x - eye[k]))) / (2 * h)
                     for k in range(n)])


def fd_hessian(fn, x, h, radius=None):
    """All second partials ``out[i, j] = d_i d_j fn`` by central second differences."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    f0 = np.asarray(fn(x))
    out = np.empty((n, n) + f0.shape)
    eye = np.eye(n) * h
    _check_stencil(x, [eye[i] + s * eye[j] for i in range(n) for j in range(n) for s in (1, -1)]
                   + list(-eye), radius)
    for i in range(n):
        out[i, i] = (np.asarray(fn(x + eye[i])) - 2 * f0 + np.asarray(fn(x - eye[i]))) / h**2
        for j in range(i + 1, n):
            val = (np.asarray(fn(x + eye[i] + eye[j])) - np.asarray(fn(x + eye[i] - eye[j]))
                   - np.asarray(fn(x - eye[i] + eye[j])) + np.asarray(fn(x - eye[i] - eye[j]))) / (4 * h**2)
            out[i, j] = out[j, i] = val
    return out


@dataclass(frozen=True)
class Patch:
    """A coordinate ball of radius ``domain_radius`` mapped into R^ambient_dim.

    ``jac(x)`` returns the (ambient_dim, dim) Jacobian of ``embed`` and
    ``hess(x)`` the (ambient_dim, dim, dim) array of second partials; either
    may be omitted, in which case finite differences take over.
    """

    dim: int
    ambient_dim: int
    embed: Callable
    jac: Optional[Callable] = None
    hess: Optional[Callable] = None
    domain_radius: float = np.inf
    name: str = ""
    steps: FDSteps = DEFAULT_STEPS

    def __post_init__(self):
        if self.dim < 1 or self.ambient_dim < self.dim:
            raise ValueError("need 1 <= dim <= ambient_dim")
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")

    def contains(self, x) -> bool:
        return float(np.linalg.norm(x)) <= self.domain_radius

    def check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} coordinates, got shape {x.shape}")
        if not self.contains(x):
            raise DomainError(f"{x} outside chart '{self.name}' (radius {self.domain_radius})")
        return x

    def jacobian(self, x):
        x = self.check(x)
        if self.jac is not None:
            return np.asarray(self.jac(x), dtype=float)
        return np.moveaxis(fd_gradient(self.embed, x, self.steps.step(1, x), self.domain_radius), 0, -1)

    def hessian(self, x):
        x = self.check(x)
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        return np.moveaxis(fd_hessian(self.embed, x, self.steps.step(2, x), self.domain_radius), (0, 1), (-2, -1))

    @property
    def analytic(self) -> bool:
        return self.jac is not None and self.hess is not None

    def with_steps(self, h1=None, h2=None) -> "Patch":
        steps = FDSteps(h1 if h1 is not None else self.steps.h1,
                        h2 if h2 is not None else self.steps.h2)
        return dataclasses.replace(self, steps=steps)

    def raw(self) -> "Patch":
        """The same patch with analytic derivative callbacks dropped."""
        return dataclasses.replace(self, jac=None, hess=None)


def compose(inner: Patch, outer: Patch, name: str = "") -> Patch:
    """The patch ``outer.embed o inner.embed``; ``inner`` maps into ``outer``'s coordinates."""
    if inner.ambient_dim != outer.dim:
        raise ValueError("inner patch must land in the outer patch's coordinates")

    def embed(u):
        return outer.embed(inner.embed(u))

    def jac(u):
        return outer.jacobian(inner.embed(u)) @ inner.jacobian(u)

    def hess(u):
        x = inner.embed(u)
        P = inner.jacobian(u)
        return (np.einsum("Aij,ia,jb->Aab", outer.hessian(x), P, P)
                + np.einsum("Ai,iab->Aab", outer.jacobian(x), inner.hessian(u)))

    return Patch(inner.dim, outer.ambient_dim, embed, jac, hess, inner.domain_radius,
                 name or f"{inner.name}->{outer.name}", inner.steps)


def check_immersion(patch: Patch, x, tol=1e-8) -> float:
    """Smallest singular value of the embedding Jacobian; raises if below ``tol``."""
    smin = float(np.linalg.svd(patch.jacobian(x), compute_uv=False)[-1])
    if smin <= tol:
        raise DegenerateFrame(f"embedding not immersive at {x}: singular value {smin:g}")
    return smin


class MetricField:
    """A Riemannian metric g_ij on a patch.

    ``deriv(x)`` (optional) returns ``dg[k, i, j] = d_k g_ij``.  Pulled-back
    metrics build it from the chain rule so that only analytic data enters.
    """

    def __init__(self, patch: Patch, eval: Callable, mode: str = "explicit", deriv: Optional[Callable] = None):
        if mode not in ("induced", "explicit"):
            raise ValueError(f"unknown metric mode {mode!r}")
        self.patch = patch
        self._eval = eval
        self._deriv = deriv
        self.mode = mode

    def __call__(self, x):
        g = np.asarray(self._eval(self.patch.check(x)), dtype=float)
        return 0.5 * (g + g.T)

    def derivative(self, x):
        x = self.patch.check(x)
        if self._deriv is not None:
            dg = np.asarray(self._deriv(x), dtype=float)
        else:
            dg = fd_gradient(self, x, self.patch.steps.step(1, x), self.patch.domain_radius)
        return 0.5 * (dg + dg.transpose(0, 2, 1))

    def inverse(self, x):
        g = self(x)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise MetricSingular(f"metric not positive definite at {x}") from exc
        return np.linalg.inv(g)

    def check_at(self, x):
        g = self(x)
        if np.any(g != g.T):
            raise MetricSingular("metric not symmetric")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise MetricSingular(f"metric not positive definite at {x}") from exc

    @classmethod
    def euclidean(cls, patch: Patch) -> "MetricField":
        n = patch.dim
        return cls(patch, lambda x: np.eye(n), "explicit", lambda x: np.zeros((n, n, n)))

    @classmethod
    def induced(cls, patch: Patch) -> "MetricField":
        """Pullback of the Euclidean metric of the ambient space along ``patch.embed``."""

        def g(x):
            J = patch.jacobian(x)
            return J.T @ J

        def dg(x):
            J = patch.jacobian(x)
            H = patch.hessian(x)
            half = np.einsum("Aki,Aj->kij", H, J)
            return half + half.transpose(0, 2, 1)

        return cls(patch, g, "induced", dg)

    @classmethod
    def pullback(cls, metric: "MetricField", inclusion: Patch) -> "MetricField":
        """Metric induced on the submanifold ``inclusion`` of ``metric.patch``."""
        sub = compose(inclusion, metric.patch)

        def g(u):
            P = inclusion.jacobian(u)
            return P.T @ metric(inclusion.embed(u)) @ P

        def dg(u):
            x = inclusion.embed(u)
            P = inclusion.jacobian(u)
            H = inclusion.hessian(u)
            G = metric(x)
            dG = metric.derivative(x)
            first = np.einsum("lij,lc,ia,jb->cab", dG, P, P, P)
            half = np.einsum("ica,ij,jb->cab", H, G, P)
            return first + half + half.transpose(0, 2, 1)

        return cls(sub, g, "induced", dg)


class TwoFormField:
    """An antisymmetric 2-form sigma_ij on a patch."""

    def __init__(self, patch: Patch, eval: Callable, deriv: Optional[Callable] = None):
        self.patch = patch
        self._eval = eval
        self._deriv = deriv

    def __call__(self, x):
        s = np.asarray(self._eval(self.patch.check(x)), dtype=float)
        return 0.5 * (s - s.T)

    def derivative(self, x):
        """``ds[k, i, j] = d_k sigma_ij``."""
        x = self.patch.check(x)
        if self._deriv is not None:
            ds = np.asarray(self._deriv(x), dtype=float)
        else:
            ds = fd_gradient(self, x, self.patch.steps.step(1, x), self.patch.domain_radius)
        return 0.5 * (ds - ds.transpose(0, 2, 1))

    def exterior_derivative(self, x):
        """``d sigma`` as the cyclic sum ``d_k s_ij + d_i s_jk + d_j s_ki``."""
        ds = self.derivative(x)
        return ds + ds.transpose(1, 2, 0) + ds.transpose(2, 0, 1)

    def closedness_residual(self, x) -> float:
        return float(np.max(np.abs(self.exterior_derivative(x)), initial=0.0))

    @classmethod
    def zero(cls, patch: Patch) -> "TwoFormField":
        n = patch.dim
        return cls(patch, lambda x: np.zeros((n, n)), lambda x: np.zeros((n, n, n)))

    @classmethod
    def constant(cls, patch: Patch, matrix) -> "TwoFormField":
        m = np.asarray(matrix, dtype=float)
        n = patch.dim
        return cls(patch, lambda x: m, lambda x: np.zeros((n, n, n)))

    @classmethod
    def pullback(cls, form: "TwoFormField", inclusion: Patch) -> "TwoFormField":
        sub = compose(inclusion, form.patch)

        def s(u):
            P = inclusion.jacobian(u)
            return P.T @ form(inclusion.embed(u)) @ P

        def ds(u):
            x = inclusion.embed(u)
            P = inclusion.jacobian(u)
            H = inclusion.hessian(u)
            S = form(x)
            first = np.einsum("lij,lc,ia,jb->cab", form.derivative(x), P, P, P)
            return (first + np.einsum("ica,ij,jb->cab", H, S, P)
                    + np.einsum("ia,ij,jcb->cab", P, S, H))

        return cls(sub, s, ds)


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    comps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "comps", np.asarray(self.comps, dtype=float))
        if not np.all(np.isfinite(self.comps)):
            raise ValueError("tangent vector has non-finite components")


def comps(v, x=None):
    """Component array of ``v``; checks the base point when ``v`` is a TangentVector."""
    if isinstance(v, TangentVector):
        if x is not None and not np.array_equal(v.base, np.asarray(x, dtype=float)):
            raise BaseMismatch(f"vector based at {v.base}, expected {x}")
        return v.comps
    return np.asarray(v, dtype=float)


def inner(g: MetricField, x, v, w) -> float:
    return float(comps(v, x) @ g(x) @ comps(w, x))


def norm(g: MetricField, x, v) -> float:
    return float(np.sqrt(inner(g, x, v, v)))


@dataclass(frozen=True)
class FramePoint:
    base: np.ndarray
    frame: tuple = field(default_factory=tuple)

    def matrix(self):
        """Frame vectors as the columns of a (dim, k) array."""
        return np.column_stack([t.comps for t in self.frame])

    @classmethod
    def checked(cls, g: MetricField, x, vectors) -> "FramePoint":
        """Validate orthonormality; small drift is repaired by re-orthonormalising."""
        x = np.asarray(x, dtype=float)
        V = np.column_stack([comps(v, x) for v in vectors])
        drift = float(np.max(np.abs(V.T @ g(x) @ V - np.eye(V.shape[1]))))
        if drift > FRAME_DRIFT_TOL:
            raise NotOrthonormal(f"frame Gram matrix off identity by {drift:g}")
        if drift > FRAME_TOL:
            return gram_schmidt(g, x, list(V.T))
        return cls(x, tuple(TangentVector(x, c) for c in V.T))


def gram_schmidt(g: MetricField, x, vectors: Sequence) -> FramePoint:
    """Orthonormalise ``vectors`` in order (modified Gram-Schmidt, one re-pass)."""
    x = np.asarray(x, dtype=float)
    G = g(x)
    out = []
    for v in vectors:
        u = comps(v, x).copy()
        n0 = np.sqrt(u @ G @ u)
        for _ in range(2):
            for e in out:
                u -= (e @ G @ u) * e
        nrm = np.sqrt(u @ G @ u)
        if nrm < PIVOT_TOL or nrm < PIVOT_TOL * n0:
            raise DegenerateFrame(f"pivot {nrm:g} below {PIVOT_TOL:g}")
        out.append(u / nrm)
    return FramePoint(x, tuple(TangentVector(x, e) for e in out))


def orthonormal_complement(g: MetricField, x, v) -> np.ndarray:
    """Orthonormal basis of v^perp as columns, built deterministically.

    The coordinate vector most aligned with ``v`` is dropped; the rest are
    orthonormalised after ``v`` in their natural order.
    """
    x = np.asarray(x, dtype=float)
    v = comps(v, x)
    G = g(x)
    n = v.shape[0]
    diag = np.sqrt(np.diag(G))
    align = np.abs(G @ v) / diag
    drop = int(np.argmax(align))
    basis = [v] + [np.eye(n)[k] for k in range(n) if k != drop]
    return gram_schmidt(g, x, basis).matrix()[:, 1:]


def check_unit(g: MetricField, x, v, tol=UNIT_TOL):
    nv = norm(g, x, v)
    if abs(nv - 1.0) > tol:
        raise NotUnit(f"|v|_g = {nv!r} is not 1 within {tol:g}")


def project_v(g: MetricField, x, v, z):
    """P_v z = g(z, v) v for a unit vector v."""
    check_unit(g, x, v)
    v = comps(v, x)
    return inner(g, x, z, v) * v


def project_vperp(g: MetricField, x, v, z):
    """P_{v^perp} z = z - g(z, v) v for a unit vector v."""
    return comps(z, x) - project_v(g, x, v, z)


def sample_points(patch: Patch, n: int, seed: int = DEFAULT_SEED, fraction: float = 0.8, rng=None):
    """``n`` points uniform in the coordinate ball of radius ``fraction * domain_radius``."""
    rng = np.random.default_rng(seed) if rng is None else rng
    radius = fraction * patch.domain_radius
    if not np.isfinite(radius):
        radius = fraction
    d = rng.standard_normal((n, patch.dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / patch.dim)
    return d * r[:, None]


def random_orthonormal(g: MetricField, x, k: int, rng) -> np.ndarray:
    """``k`` random g-orthonormal vectors at ``x`` as columns."""
    n = g.patch.dim
    while True:
        try:
            return gram_schmidt(g, x, list(rng.standard_normal((k, n)))).matrix()
        except DegenerateFrame:
            continue
