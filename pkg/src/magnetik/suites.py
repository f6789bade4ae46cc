"""Verification sweeps over the catalog geometries.

Every sweep returns :class:`CheckRecord` entries; a :class:`SuiteReport`
collects them in a deterministic order.  Each (check, geometry) pair draws
its samples from a fresh generator seeded with the suite seed, so results
do not depend on which other checks ran.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import dim3, flow
from . import geometries as geo
from . import submanifold as sm
from .chart import DEFAULT_SEED, DEFAULT_STEPS, FDSteps, random_orthonormal, sample_points
from .connection import ricci, riemann_tensor, sectional
from .errors import NotStatic
from .magnetic import MagneticCurvature, lorentz, skewness_residual

SUITES = ("classical", "theoremA", "corollaryB", "corollaryC", "props", "appendix")
DEFAULT_S = (0.5, 1.0, 2.0)
DEFAULT_SAMPLES = 50

TOL_FIRST = 1e-5
TOL_SECOND = 1e-4
TOL_PROJECTOR = 1e-10
TOL_DUALITY = 1e-6


@dataclass(frozen=True)
class CheckRecord:
    """One sweep result.

    ``mode == "max"`` passes when ``value < tol``; ``mode == "min"`` is used
    for existence witnesses and passes when ``value > tol``.
    """

    check: str
    geometry: str
    s: Optional[float]
    samples: int
    value: float
    tol: float
    mode: str = "max"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return bool(self.value < self.tol if self.mode == "max" else self.value > self.tol)

    def key(self):
        return (self.check, self.geometry, -1.0 if self.s is None else self.s)

    def to_dict(self):
        return {"check": self.check, "geometry": self.geometry, "s": self.s, "samples": self.samples,
                "mode": self.mode, "value": float(self.value), "tol": self.tol, "passed": self.passed}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    steps: FDSteps
    records: List[CheckRecord] = field(default_factory=list)
    wall_time: float = 0.0
    started: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.passed]

    def to_dict(self, meta: bool = True):
        out = {
            "schema": 1,
            "suite": self.suite,
            "seed": self.seed,
            "h1": self.steps.h1,
            "h2": self.steps.h2,
            "passed": self.passed,
            "records": [r.to_dict() for r in sorted(self.records, key=CheckRecord.key)],
        }
        if meta:
            out["started"] = self.started
            out["wall_time"] = self.wall_time
        return out


def _rng(seed, *tags):
    tag = sum((i + 1) * sum(map(ord, str(t))) for i, t in enumerate(tags))
    return np.random.default_rng([seed, tag])


def _submanifold_samples(sub, n, rng):
    for u in sample_points(sub.inclusion, n, rng=rng):
        F = random_orthonormal(sub.N.g, u, 2, rng)
        yield u, F[:, 0], F[:, 1]


def _random_normal(sub, u, rng):
    pt = sub.at(u)
    while True:
        xi = pt.nor(rng.standard_normal(sub.m))
        n = pt.norm(xi)
        if n > 1e-3:
            return xi / n


# --- submanifold sweeps ------------------------------------------------------

def sweep_classical(keys, samples, seed, steps, tol=TOL_FIRST):
    out = []
    for key in keys:
        sub = geo.submanifold(key, steps)
        rng = _rng(seed, "classical", key)
        worst = {"gauss": 0.0, "codazzi": 0.0, "ricci": 0.0}
        for u, v, w in _submanifold_samples(sub, samples, rng):
            z = random_orthonormal(sub.N.g, u, 1, rng)[:, 0]
            Rm = riemann_tensor(sub.M.g, sub.point(u))
            xi = _random_normal(sub, u, rng)
            worst["gauss"] = max(worst["gauss"], sm.residual_classical(sub, "gauss", u, v, w, z, Rm))
            worst["codazzi"] = max(worst["codazzi"], sm.residual_classical(sub, "codazzi", u, v, w, z, Rm))
            worst["ricci"] = max(worst["ricci"], sm.residual_classical(sub, "ricci", u, v, w, xi, Rm))
        out += [CheckRecord(k, key, None, samples, r, tol) for k, r in worst.items()]
    return out


def _snapshots(sub, u):
    return MagneticCurvature(sub.M, sub.point(u)), MagneticCurvature(sub.N, u)


def sweep_theoremA(keys, s_values, samples, seed, steps, tol=TOL_SECOND):
    out = []
    for key in keys:
        sub = geo.submanifold(key, steps)
        rng = _rng(seed, "theoremA", key)
        tan = {s: 0.0 for s in s_values}
        nor = {s: 0.0 for s in s_values}
        for u, v, w in _submanifold_samples(sub, samples, rng):
            cM, cN = _snapshots(sub, u)
            for s in s_values:
                t, n = sm.residual_theoremA(sub, s, u, v, w, cM, cN)
                tan[s] = max(tan[s], t)
                nor[s] = max(nor[s], n)
        for s in s_values:
            out.append(CheckRecord("theoremA-tangential", key, s, samples, tan[s], tol))
            out.append(CheckRecord("theoremA-normal", key, s, samples, nor[s], tol))
    return out


def h2_refinement(key, s, h2, samples=5, seed=DEFAULT_SEED, h1=DEFAULT_STEPS.h1):
    """Worst magnetic Gauss-Codazzi residual (tangential + normal) at h2 and at h2 / 2 on the same samples."""
    res = []
    for h in (h2, h2 / 2):
        sub = geo.submanifold(key, FDSteps(h1, h))
        rng = _rng(seed, "refine", key)
        worst = 0.0
        for u, v, w in _submanifold_samples(sub, samples, rng):
            worst = max(worst, sum(sm.residual_theoremA(sub, s, u, v, w)))
        res.append(worst)
    return tuple(res)


def refinement_ratio(coarse: float, fine: float, floor: float = 1e-7) -> float:
    """fine / coarse, or 0 when the coarse residual already sits at the roundoff floor."""
    return 0.0 if coarse < floor else fine / coarse


def sweep_refinement(keys, s_values, seed, h2_values=(1e-2, 1e-4), samples=5):
    out = []
    for key in keys:
        for s in s_values:
            for h2 in h2_values:
                coarse, fine = h2_refinement(key, s, h2, samples, seed)
                out.append(CheckRecord(f"theoremA-h2-halving@{h2:g}", key, s, samples,
                                       refinement_ratio(coarse, fine), 0.5))
    return out


def sweep_corollaryB(keys, s_values, samples, seed, steps, tol=TOL_SECOND):
    out = []
    for key in keys:
        sub = geo.submanifold(key, steps)
        rng = _rng(seed, "corollaryB", key)
        worst = {s: 0.0 for s in s_values}
        for u, v, w in _submanifold_samples(sub, samples, rng):
            cM, cN = _snapshots(sub, u)
            for s in s_values:
                worst[s] = max(worst[s], sm.residual_corollaryB(sub, s, u, v, w, cM, cN))
        out += [CheckRecord("corollaryB", key, s, samples, worst[s], tol) for s in s_values]
    return out


def sweep_corollaryC(keys, s_values, samples, seed, steps, tol=TOL_SECOND):
    out = []
    for key in keys:
        sub = geo.submanifold(key, steps)
        if sub.m - sub.n != 1:
            continue
        rng = _rng(seed, "corollaryC", key)
        r_i = {s: 0.0 for s in s_values}
        r_ii = {s: 0.0 for s in s_values}
        flip = 0.0
        for u, v, w in _submanifold_samples(sub, samples, rng):
            cM, cN = _snapshots(sub, u)
            for s in s_values:
                a = sm.residual_corollaryC(sub, s, u, v, w, False, cM, cN)
                b = sm.residual_corollaryC(sub, s, u, v, w, True, cM, cN)
                r_i[s] = max(r_i[s], a[0])
                r_ii[s] = max(r_ii[s], a[1])
                flip = max(flip, abs(a[0] - b[0]), abs(a[1] - b[1]))
        for s in s_values:
            out.append(CheckRecord("corollaryC-i", key, s, samples, r_i[s], tol))
            out.append(CheckRecord("corollaryC-ii", key, s, samples, r_ii[s], tol))
        out.append(CheckRecord("corollaryC-eta-flip", key, None, samples, flip, 1e-10))
    return out


def sweep_props(keys, s_values, samples, seed, steps):
    out = []
    for key in keys:
        sub = geo.submanifold(key, steps)
        rng = _rng(seed, "props", key)
        w_ = {k: 0.0 for k in ("lemma-tan", "lemma-nor", "propA-tan", "propA-nor", "II-symmetry",
                               "duality", "mag-duality", "projectors", "Y-skew", "propRs-tan",
                               "propRs-nor", "propRs-s-structure", "induced-lorentz")}
        for u, v, w in _submanifold_samples(sub, samples, rng):
            pt = sub.at(u)
            cM, cN = _snapshots(sub, u)
            a, b = sm.residual_lemma_nablaY(sub, u, v, w)
            w_["lemma-tan"] = max(w_["lemma-tan"], a)
            w_["lemma-nor"] = max(w_["lemma-nor"], b)
            a, b = sm.residual_prop_A(sub, u, v, w, cM, cN)
            w_["propA-tan"] = max(w_["propA-tan"], a)
            w_["propA-nor"] = max(w_["propA-nor"], b)
            for s in s_values:
                a, b = sm.residual_prop_Rs(sub, s, u, v, w, cM, cN)
                w_["propRs-tan"] = max(w_["propRs-tan"], a)
                w_["propRs-nor"] = max(w_["propRs-nor"], b)
            w_["propRs-s-structure"] = max(w_["propRs-s-structure"], rs_quadratic_defect(sub, u, v, w))
            w_["II-symmetry"] = max(w_["II-symmetry"], pt.norm(pt.II(v, w) - pt.II(w, v)))
            xi = _random_normal(sub, u, rng)
            d1 = abs(pt.g(pt.II(v, w), xi) - pt.g(sm.shape_operator(sub, u, xi, v), pt.P @ w))
            w_["duality"] = max(w_["duality"], d1)
            for s in s_values:
                d2 = abs(pt.g(sm.mag_II(sub, s, u, v, w), xi) - pt.g(sm.mag_shape(sub, s, u, v, xi), pt.P @ w))
                w_["mag-duality"] = max(w_["mag-duality"], d2)
            z = rng.standard_normal(sub.m)
            w_["projectors"] = max(w_["projectors"], *sm.projector_residuals(sub, u, v, z))
            w_["Y-skew"] = max(w_["Y-skew"], skewness_residual(sub.M, pt.x), skewness_residual(sub.N, u))
            w_["induced-lorentz"] = max(w_["induced-lorentz"], sm.induced_lorentz_mismatch(sub, u, w))
        tols = {"lemma-tan": TOL_FIRST, "lemma-nor": TOL_FIRST, "propA-tan": TOL_SECOND, "propA-nor": TOL_SECOND,
                "propRs-tan": TOL_SECOND, "propRs-nor": TOL_SECOND, "propRs-s-structure": TOL_SECOND,
                "II-symmetry": TOL_DUALITY, "duality": TOL_DUALITY, "mag-duality": TOL_DUALITY,
                "projectors": TOL_PROJECTOR, "Y-skew": TOL_PROJECTOR, "induced-lorentz": 1e-8}
        out += [CheckRecord(k, key, None, samples, r, tols[k]) for k, r in w_.items()]
    return out


def rs_quadratic_defect(sub, u, v, w, s_values=(0.5, 1.0, 2.0)) -> float:
    """Fit the Prop R_s tangential residual vector at two values of s as a + b s + c s^2 and test at a third.

    Both sides of the decomposition are polynomials of degree 2 in s; the
    residual vector at s = 0 vanishes, so two evaluations fix b and c.
    """
    pt = sub.at(u)
    cM, cN = _snapshots(sub, u)

    def vec(s):
        lhs = cM.R_s(s, pt.P @ v, pt.P @ w)
        tan_extra, nor = sm._Rs_rhs(sub, pt, s, v, w)
        return np.concatenate([pt.tan(lhs) - (pt.P @ cN.R_s(s, v, w) + tan_extra), pt.nor(lhs) - nor])

    s1, s2, s3 = s_values
    r1, r2 = vec(s1), vec(s2)
    M = np.array([[s1, s1**2], [s2, s2**2]])
    coef = np.linalg.solve(M, np.vstack([r1, r2]))
    pred = s3 * coef[0] + s3**2 * coef[1]
    return float(np.max(np.abs(pred - vec(s3))))


# --- ambient and appendix sweeps ----------------------------------------------

def s3_manifold(steps=DEFAULT_STEPS, sigma="i"):
    """S^3 with the volume orientation for which E_i x E_j = E_k."""
    m = dim3.OrientedThreeManifold(geo.s3_system(sigma, steps=steps), volume_sign=1)
    e = dim3.s3_frame(np.zeros(3))
    if np.max(np.abs(dim3.cross(m, np.zeros(3), e[0], e[1]) - e[2])) > 1e-12:
        raise AssertionError("S^3 orientation does not satisfy E_i x E_j = E_k")
    return m


def appendix_frame_residuals(n=100, seed=DEFAULT_SEED, steps=DEFAULT_STEPS):
    """Worst residuals of curl E_i = 2E_i, [E_a, E_b] = -2E_c and E_i x E_j = E_k on S^3."""
    m = s3_manifold(steps, None)
    fields = [geo.s3_frame_field(a) for a in "ijk"]
    worst = {"curl": 0.0, "bracket": 0.0, "cross": 0.0, "orthonormal": 0.0}
    for x in sample_points(m.patch, n, seed):
        E = geo.s3_frame_chart(x)
        G = m.g(x)
        worst["orthonormal"] = max(worst["orthonormal"], float(np.max(np.abs(E @ G @ E.T - np.eye(3)))))
        for a in range(3):
            b, c = (a + 1) % 3, (a + 2) % 3
            worst["curl"] = max(worst["curl"], float(np.max(np.abs(dim3.curl(m, fields[a], x) - 2 * E[a]))))
            br = dim3.lie_bracket(m, fields[a], fields[b], x)
            worst["bracket"] = max(worst["bracket"], float(np.max(np.abs(br + 2 * E[c]))))
            worst["cross"] = max(worst["cross"], float(np.max(np.abs(dim3.cross(m, x, E[a], E[b]) - E[c]))))
    return worst


def flatness_witness(s=0.4, x=None, steps=DEFAULT_STEPS) -> float:
    """mag_sec on S^3 sigma^i at v = 2s E_i + sqrt(1 - 4 s^2) E_j, w = sqrt(1 - 4 s^2) E_i - 2s E_j."""
    system = geo.s3_system("i", steps=steps)
    x = np.zeros(3) if x is None else np.asarray(x, float)
    E = geo.s3_frame_chart(x)
    c = np.sqrt(1 - 4 * s * s)
    v = 2 * s * E[0] + c * E[1]
    w = c * E[0] - 2 * s * E[1]
    return MagneticCurvature(system, x).sec(s, v, w)


def stiefel_min_sec(s=0.6, points=100, pairs=100, seed=DEFAULT_SEED, steps=DEFAULT_STEPS) -> float:
    """Minimum of mag_sec on S^3 sigma^i over points x pairs random orthonormal pairs."""
    system = geo.s3_system("i", steps=steps)
    rng = _rng(seed, "stiefel")
    best = np.inf
    for x in sample_points(system.patch, points, rng=rng):
        mc = MagneticCurvature(system, x)
        for _ in range(pairs):
            F = random_orthonormal(system.g, x, 2, rng)
            best = min(best, mc.sec(s, F[:, 0], F[:, 1]))
    return float(best)


def fig2_residual(s_values=(0.1, 0.25, 0.5, 1.0, 2.0), points=5, seed=DEFAULT_SEED, steps=DEFAULT_STEPS):
    """Worst |Ric_s(E_i) - (2s^2 - 2s + 1/2)| through the generic pipeline."""
    system = geo.s3_system("i", steps=steps)
    pts = [np.zeros(3)] + list(sample_points(system.patch, points, seed))
    worst = 0.0
    for x in pts:
        mc = MagneticCurvature(system, x)
        Ei = geo.s3_frame_chart(x)[0]
        for s in s_values:
            worst = max(worst, abs(mc.ric(s, Ei) - (2 * s * s - 2 * s + 0.5)))
    return worst


def sweep_appendix(samples, seed, steps, s_values=(0.3, 0.5, 1.0, 2.0)):
    out = []
    fr = appendix_frame_residuals(100, seed, steps)
    out += [CheckRecord(f"s3-{k}", "s3-stereo", None, 100, v, 1e-6 if k != "orthonormal" else 1e-10)
            for k, v in fr.items()]
    out.append(CheckRecord("fig2-ric", "s3-sigmai", None, 6, fig2_residual(steps=steps), 1e-5))
    out.append(CheckRecord("flatness-witness", "s3-sigmai", 0.4, 1, abs(flatness_witness(0.4, steps=steps)), 1e-6))
    out.append(CheckRecord("stiefel-min-sec", "s3-sigmai", 0.6, 10000, stiefel_min_sec(0.6, steps=steps), 0.0, "min"))

    m = s3_manifold(steps)
    Ei = dim3.KillingField(geo.s3_frame_field("i"))
    system = m.system
    rng = _rng(seed, "appendix-killing")
    worst = {"killing-A": 0.0, "killing-Rs": 0.0, "killing-sec": 0.0, "killing-ric": 0.0,
             "killing-closed-form": 0.0, "lorentz-cross": 0.0, "koszul-curl": 0.0,
             "double-cross": 0.0, "int-curl": 0.0, "killing-field": 0.0}
    asym = 0.0
    for x in sample_points(m.patch, samples, rng=rng):
        F = random_orthonormal(m.g, x, 3, rng)
        v, w, z = F[:, 0], F[:, 1], rng.standard_normal(3)
        mc = MagneticCurvature(system, x)
        k = dim3._KillingPoint(m, Ei, x)
        worst["killing-field"] = max(worst["killing-field"], Ei.killing_residual(m, x))
        worst["lorentz-cross"] = max(worst["lorentz-cross"],
                                     float(np.max(np.abs(mc.Y @ w - dim3.cross(m, x, k.B, w)))))
        worst["killing-A"] = max(worst["killing-A"],
                                 float(np.max(np.abs(dim3.killing_A(m, Ei, 1.0, x, v, w) - mc.A(v, w)))))
        for s in s_values:
            worst["killing-Rs"] = max(worst["killing-Rs"], float(np.max(np.abs(
                dim3.killing_Rs(m, Ei, s, x, v, w) - mc.R_s(s, v, w)))))
            worst["killing-sec"] = max(worst["killing-sec"], abs(dim3.killing_mag_sec(m, Ei, s, x, v, w) - mc.sec(s, v, w)))
            worst["killing-ric"] = max(worst["killing-ric"], abs(dim3.killing_mag_ric(m, Ei, s, x, v) - mc.ric(s, v)))
            worst["killing-closed-form"] = max(worst["killing-closed-form"],
                                               s3_specialization_residual(s, k.g(k.B, v), k.g(k.B, dim3.cross(m, x, v, w))))
            asym = max(asym, abs(mc.sec(s, v, w) - mc.sec(s, w, v)))
        D = dim3.covariant_jacobian(m, Ei, x)
        for e in np.eye(3):
            worst["koszul-curl"] = max(worst["koszul-curl"], float(np.max(np.abs(
                D @ e - 0.5 * dim3.cross(m, x, k.curlB, e)))))
        worst["double-cross"] = max(worst["double-cross"], *double_cross_residuals(m, x, v, w, z, rng.standard_normal(3)))
        worst["int-curl"] = max(worst["int-curl"], int_curl_residual(m, Ei, x))
    tols = {"killing-A": 1e-6, "killing-Rs": 1e-5, "killing-sec": 1e-5, "killing-ric": 1e-5,
            "killing-closed-form": 1e-8, "lorentz-cross": 1e-8, "koszul-curl": 1e-6,
            "double-cross": 1e-8, "int-curl": 1e-5, "killing-field": 1e-6}
    out += [CheckRecord(kk, "s3-sigmai", None, samples, val, tols[kk]) for kk, val in worst.items()]
    out.append(CheckRecord("mag-sec-asymmetry", "s3-sigmai", None, samples, asym, 0.01, "min"))

    try:
        static_K_check(m, Ei, steps)
        rejected = 0.0
    except NotStatic:
        rejected = 1.0
    out.append(CheckRecord("static-rejects-Ei", "s3-sigmai", None, 1, rejected, 0.5, "min"))
    out += sweep_static(samples, seed, steps)
    out += sweep_reductions(samples, seed, steps)
    return out


def s3_specialization_residual(s, gEv, gExvw) -> float:
    """Killing closed forms with sec = Ric/2 = 1, curl E_i = 2E_i, |E_i| = 1 against the S^3 formulas."""
    sec = dim3.killing_sec_closed(s, 1.0, 2.0 * gEv, gExvw, gEv)
    ric = dim3.killing_ric_closed(s, 2.0, 2.0 * gEv, 1.0, gEv)
    return max(abs(sec - ((s - 0.5 * gEv) ** 2 + gExvw**2)),
               abs(ric - (2 * s * s - 2 * s * gEv + 1 - 0.5 * gEv**2)))


def static_K_check(m, B, steps):
    sub = geo.submanifold("greats2-in-s3-sigmai", steps)
    return dim3.static_K(m, B, sub, 1.0, np.array([0.2, 0.1]), np.array([1.0, 0.0]) / np.sqrt(sub.N.g(np.array([0.2, 0.1]))[0, 0]))


def double_cross_residuals(m, x, v, w, z, q):
    G = m.g(x)
    g = lambda a, b: float(a @ G @ b)
    X = lambda a, b: dim3.cross(m, x, a, b)
    r1 = float(np.max(np.abs(X(v, X(w, z)) - (g(v, z) * w - g(v, w) * z))))
    r2 = abs(g(X(v, w), z) - g(v, X(w, z)))
    r3 = abs(g(X(v, w), X(z, q)) - (g(v, z) * g(w, q) - g(v, q) * g(w, z)))
    return r1, r2, r3


def int_curl_residual(m, B, x):
    """X g(Y, B) - Y g(X, B) - g(curl B, X x Y) for coordinate fields X, Y (whose bracket vanishes)."""
    Bflat = dim3.flat(m, B)
    from .chart import fd_gradient

    d = fd_gradient(Bflat, x, m.patch.steps.step(1, x), m.patch.domain_radius)
    c = dim3.curl(m, B, x)
    G = m.g(x)
    worst = 0.0
    for i in range(3):
        for j in range(3):
            lhs = d[i, j] - d[j, i]
            rhs = float(c @ G @ dim3.cross(m, x, np.eye(3)[i], np.eye(3)[j]))
            worst = max(worst, abs(lhs - rhs))
    return worst


def sweep_static(samples, seed, steps, b=0.7, s_values=DEFAULT_S):
    sub = geo.submanifold("plane-in-r3-static", steps)
    m = dim3.OrientedThreeManifold(sub.M)
    B = dim3.KillingField(lambda x: np.array([0.0, 0.0, b]))
    rng = _rng(seed, "static")
    magII = 0.0
    K_err = 0.0
    intrinsic_err = 0.0
    plane = geo.flat_plane_system(b, steps)
    for u, v, w in _submanifold_samples(sub, samples, rng):
        mcN = MagneticCurvature(sub.N, u)
        mc2 = MagneticCurvature(plane, u)
        for s in s_values:
            magII = max(magII, sub.at(u).norm(sm.mag_II(sub, s, u, v, v)))
            K = dim3.static_K(m, B, sub, s, u, v)
            K_err = max(K_err, abs(K - b * b))
            intrinsic_err = max(intrinsic_err, abs(mcN.sec(s, v, w) - b * b), abs(mc2.sec(s, v, w) - K))
    return [CheckRecord("static-magII-diagonal", "plane-in-r3-static", None, samples, magII, 1e-8),
            CheckRecord("static-K", "plane-in-r3-static", None, samples, K_err, 1e-6),
            CheckRecord("static-intrinsic", "plane-in-r3-static", None, samples, intrinsic_err, 1e-6)]


def sweep_reductions(samples, seed, steps, s_values=DEFAULT_S):
    """sigma = 0 reduction to s^2 sec and s^2 Ric, and basis independence of Ric_s."""
    rng = _rng(seed, "reductions")
    zero = geo.s3_system(None, steps=steps)
    sig = geo.s3_system("i", steps=steps)
    red = 0.0
    basis = 0.0
    for x in sample_points(zero.patch, samples, rng=rng):
        F = random_orthonormal(zero.g, x, 3, rng)
        v, w = F[:, 0], F[:, 1]
        mc0 = MagneticCurvature(zero, x)
        mc1 = MagneticCurvature(sig, x)
        sec = sectional(zero.g, x, v, w, mc0.Rm)
        ric = ricci(zero.g, x, v, mc0.Rm)
        for s in s_values:
            red = max(red, abs(mc0.sec(s, v, w) - s * s * sec), abs(mc0.ric(s, v) - s * s * ric))
            basis = max(basis, abs(mc1.ric(s, v) - mc1.ric(s, v, basis=F[:, 1:])))
    return [CheckRecord("sigma0-reduction", "s3-stereo", None, samples, red, 1e-8),
            CheckRecord("ric-basis-independence", "s3-sigmai", None, samples, basis, 1e-8)]


# --- orchestration ----------------------------------------------------------

def run_suite(name: str, geometries: Optional[Sequence[str]] = None, s_values: Optional[Iterable[float]] = None,
              samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, steps: FDSteps = DEFAULT_STEPS,
              tol: Optional[float] = None) -> SuiteReport:
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    keys = list(geometries) if geometries else list(geo.SUBMANIFOLDS)
    s_values = tuple(s_values) if s_values else DEFAULT_S
    report = SuiteReport(name, seed, steps, started=datetime.now(timezone.utc).isoformat())
    t0 = time.perf_counter()
    names = SUITES if name == "all" else (name,)
    recs = []
    for n in names:
        if n == "classical":
            recs += sweep_classical(keys, samples, seed, steps)
        elif n == "theoremA":
            recs += sweep_theoremA(keys, s_values, samples, seed, steps)
            recs += sweep_refinement([k for k in keys if k != "plane-in-r3-static"], s_values[:1], seed)
        elif n == "corollaryB":
            recs += sweep_corollaryB(keys, s_values, samples, seed, steps)
        elif n == "corollaryC":
            recs += sweep_corollaryC(keys, s_values, samples, seed, steps)
        elif n == "props":
            recs += sweep_props(keys, s_values, samples, seed, steps)
        elif n == "appendix":
            recs += sweep_appendix(samples, seed, steps)
    if tol is not None:
        recs = [CheckRecord(r.check, r.geometry, r.s, r.samples, r.value, tol, r.mode) if r.mode == "max" else r
                for r in recs]
    report.records = sorted(recs, key=CheckRecord.key)
    report.wall_time = time.perf_counter() - t0
    return report
