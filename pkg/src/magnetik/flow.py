"""Magnetic geodesics, the free-period action and Mañé critical value brackets."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.integrate import simpson

from .chart import DEFAULT_SEED, fd_gradient, sample_points
from .connection import christoffel_array
from .errors import BracketError, DomainError, DomainExit, NotAPrimitive
from .geometries import s3_coframe, s3_frame_field
from .magnetic import MagneticSystem, lorentz

PRIMITIVE_TOL = 1e-5
MIN_PANELS = 1024
LOOP_CLOSURE_TOL = 1e-10


def landau_hall_rhs(system: MagneticSystem, state) -> np.ndarray:
    """(x', v') with v'^k = -Gamma^k_ij v^i v^j + (Y v)^k."""
    state = np.asarray(state, dtype=float)
    n = system.dim
    x, v = state[:n], state[n:]
    x = system.patch.check(x)
    acc = -np.einsum("kij,i,j->k", christoffel_array(system.g, x), v, v) + lorentz(system, x) @ v
    return np.concatenate([v, acc])


def speed(system: MagneticSystem, x, v) -> float:
    return float(np.sqrt(max(v @ system.g(x) @ v, 0.0)))


def frame_momentum(which: str = "i"):
    """Conserved quantity g(gamma', E_a) for the S^3 Killing systems."""
    E = s3_frame_field(which)
    return lambda system, x, v: float(v @ system.g(x) @ E(x))


@dataclass
class Trajectory:
    dim: int
    dt: float
    dt_requested: float
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    velocities: list = field(default_factory=list)
    speed: list = field(default_factory=list)
    conserved: Dict[str, list] = field(default_factory=dict)
    charts: list = field(default_factory=list)
    recenterings: list = field(default_factory=list)
    exited: bool = False
    exit_reason: str = ""

    def record(self, t, x, v, spd, extra, chart):
        self.times.append(float(t))
        self.positions.append(np.array(x, dtype=float))
        self.velocities.append(np.array(v, dtype=float))
        self.speed.append(float(spd))
        for k, val in extra.items():
            self.conserved.setdefault(k, []).append(float(val))
        self.charts.append(chart)

    def __len__(self):
        return len(self.times)

    @property
    def final_position(self):
        return self.positions[-1]

    def speed_drift(self) -> float:
        s = np.asarray(self.speed)
        return float(np.max(np.abs(s - s[0])))

    def conserved_drift(self, name: str) -> float:
        c = np.asarray(self.conserved[name])
        return float(np.max(np.abs(c - c[0])))

    def columns(self):
        n = self.dim
        return (["t"] + [f"x{i}" for i in range(n)] + [f"v{i}" for i in range(n)]
                + ["speed"] + list(self.conserved))

    def rows(self):
        names = list(self.conserved)
        for k, t in enumerate(self.times):
            yield ([t] + list(self.positions[k]) + list(self.velocities[k])
                   + [self.speed[k]] + [self.conserved[c][k] for c in names])

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for row in self.rows():
            w.writerow(["%.17g" % float(val) for val in row])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_dict(self):
        return {
            "schema": 1,
            "dim": self.dim,
            "dt": self.dt,
            "dt_requested": self.dt_requested,
            "exited": self.exited,
            "exit_reason": self.exit_reason,
            "columns": self.columns(),
            "rows": [[float(v) for v in row] for row in self.rows()],
            "charts": [list(c) for c in self.charts] if any(c is not None for c in self.charts) else None,
            "recenterings": self.recenterings,
            "speed_drift": self.speed_drift() if self.speed else None,
            "conserved_drift": {k: self.conserved_drift(k) for k in self.conserved},
        }

    def to_json(self, fh=None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if fh is not None:
            fh.write(text)
        return text


def _rk4_step(system, x, v, dt):
    n = system.dim
    y = np.concatenate([x, v])
    k1 = landau_hall_rhs(system, y)
    k2 = landau_hall_rhs(system, y + 0.5 * dt * k1)
    k3 = landau_hall_rhs(system, y + 0.5 * dt * k2)
    k4 = landau_hall_rhs(system, y + dt * k3)
    y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[:n], y[n:]


def integrate(system: MagneticSystem, x0, v0, T: float, dt: float,
              conserved: Optional[Dict[str, Callable]] = None, recenter: bool = True) -> Trajectory:
    """Classical RK4 for the Landau-Hall equation with n = round(T/dt) equal steps.

    When the system carries a recentering hook, the state is moved to a
    fresh chart whenever it drifts past the hook's threshold; otherwise
    leaving the chart raises :class:`DomainExit` with the partial trajectory.
    """
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    steps = max(1, int(round(T / dt)))
    h = T / steps
    x = system.patch.check(x0).copy()
    v = np.asarray(v0, dtype=float).copy()
    s0 = speed(system, x, v)
    if s0 <= 0:
        raise ValueError("initial speed must be positive")
    conserved = conserved or {}
    hook = system.recentering if recenter else None
    chart = hook.identity if hook is not None else None
    traj = Trajectory(system.dim, h, float(dt))

    def log(t):
        traj.record(t, x, v, speed(system, x, v), {k: f(system, x, v) for k, f in conserved.items()}, chart)

    log(0.0)
    for k in range(1, steps + 1):
        if hook is not None and hook.needs(x):
            x, v, chart, drift = hook.recenter(x, v, chart)
            traj.recenterings.append({"t": traj.times[-1], "drift": drift})
        try:
            x, v = _rk4_step(system, x, v, h)
            system.patch.check(x)
        except DomainError as exc:
            traj.exited = True
            traj.exit_reason = str(exc)
            raise DomainExit(f"trajectory left the chart at t ~ {k * h:g}: {exc}", traj) from exc
        log(k * h)
    return traj


# --- loops and the action functional -----------------------------------------

@dataclass(frozen=True)
class LoopCurve:
    """A closed curve t -> coordinates on [0, T]."""

    path: Callable
    T: float
    velocity: Optional[Callable] = None
    h: float = 1e-6

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("loop period must be positive")
        gap = np.max(np.abs(np.asarray(self.path(0.0)) - np.asarray(self.path(self.T))))
        if gap >= LOOP_CLOSURE_TOL:
            raise ValueError(f"loop endpoints differ by {gap:g}")

    def point(self, t):
        return np.asarray(self.path(t), dtype=float)

    def tangent(self, t):
        if self.velocity is not None:
            return np.asarray(self.velocity(t), dtype=float)
        h = self.h * max(1.0, abs(t))
        return (self.point(t + h) - self.point(t - h)) / (2 * h)


def constant_loop(x, T: float) -> LoopCurve:
    x = np.asarray(x, dtype=float)
    return LoopCurve(lambda t: x, T, lambda t: np.zeros_like(x))


class OneFormPrimitive:
    """A 1-form theta (covector-valued callable) with d theta = sigma."""

    def __init__(self, system: MagneticSystem, theta: Callable, name: str = "", check: bool = True,
                 samples: int = 10, seed: int = DEFAULT_SEED):
        self.system = system
        self.theta = theta
        self.name = name
        if check:
            self.verify(samples, seed)

    def __call__(self, x):
        return np.asarray(self.theta(x), dtype=float)

    def residual(self, x) -> float:
        patch = self.system.patch
        x = patch.check(x)
        d = fd_gradient(self.theta, x, patch.steps.step(1, x), patch.domain_radius)
        return float(np.max(np.abs(d - d.T - self.system.sigma(x))))

    def verify(self, samples=10, seed=DEFAULT_SEED, tol=PRIMITIVE_TOL):
        for x in sample_points(self.system.patch, samples, seed):
            r = self.residual(x)
            if r >= tol:
                raise NotAPrimitive(f"|d theta - sigma| = {r:g} at {x}")

    def dual_norm(self, x) -> float:
        th = self(x)
        return float(np.sqrt(max(th @ self.system.g.inverse(x) @ th, 0.0)))

    def scaled(self, factor: float) -> "OneFormPrimitive":
        return OneFormPrimitive(self.system.scaled(factor), lambda x: factor * self(x), check=False)


def zero_primitive(system: MagneticSystem) -> OneFormPrimitive:
    return OneFormPrimitive(system, lambda x: np.zeros(system.dim))


def action(system: MagneticSystem, theta: OneFormPrimitive, loop: LoopCurve, s: float,
           panels: int = MIN_PANELS) -> float:
    """A_s(loop) = int_0^T 1/2 (|gamma'|^2 + s^2) - theta(gamma') dt by composite Simpson."""
    panels = max(int(panels), MIN_PANELS)
    panels += panels % 2
    t = np.linspace(0.0, loop.T, panels + 1)
    vals = np.empty_like(t)
    for k, tk in enumerate(t):
        x = loop.point(tk)
        v = loop.tangent(tk)
        vals[k] = 0.5 * (v @ system.g(x) @ v + s * s) - theta(x) @ v
    return float(simpson(vals, x=t))


def mane_upper(system: MagneticSystem, theta: OneFormPrimitive, samples: int = 200,
               seed: int = DEFAULT_SEED) -> float:
    """sup of |theta|_g over seeded sample points (and the chart origin)."""
    pts = [np.zeros(system.dim)] + list(sample_points(system.patch, samples, seed))
    return max(theta.dual_norm(x) for x in pts)


@dataclass(frozen=True)
class ManeBracket:
    lower: float
    upper: float
    witness_s: Optional[float]
    witness_action: Optional[float]

    @property
    def width(self):
        return self.upper - self.lower

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper,
                "witness_s": self.witness_s, "witness_action": self.witness_action}


def mane_estimate(system: MagneticSystem, theta: OneFormPrimitive, witness_family: Callable,
                  s_max: Optional[float] = None, grid: int = 64, tol: float = 1e-6,
                  slack: float = 1e-8) -> ManeBracket:
    """Two-sided bracket for the Mañé critical value.

    The upper end is the sup-norm of the primitive.  The lower end is the
    largest s at which the witness loop ``witness_family(s)`` has negative
    action, located by a grid scan followed by bisection on the sign.
    """
    upper = mane_upper(system, theta)
    top = s_max if s_max is not None else max(2.0 * upper, 1.0)
    A = lambda s: action(system, theta, witness_family(s), s)
    grid_s = np.linspace(top / grid, top, grid)
    negative = [s for s in grid_s if A(s) < 0]
    if not negative:
        return ManeBracket(0.0, float(upper), None, None)
    lo = max(negative)
    hi = next((s for s in grid_s if s > lo), top)
    if A(hi) < 0:
        raise BracketError("witness action still negative at the top of the scan")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if A(mid) < 0:
            lo = mid
        else:
            hi = mid
    if lo > upper + slack:
        raise BracketError(f"lower bound {lo:g} exceeds upper bound {upper:g}")
    lo = float(lo)
    return ManeBracket(lo, float(upper), lo, float(A(lo)))


# --- S^3 witnesses ---------------------------------------------------------

def s3_theta_primitive(system: MagneticSystem, which: str = "i", scale: float = 0.5, check: bool = True):
    """theta = scale * theta^a in the stereographic S^3 chart."""
    a = "ijk".index(which)
    return OneFormPrimitive(system, lambda u: scale * s3_coframe(system.g, u)[a],
                            name=f"{scale:g}theta{which}", check=check)


def s3_circle_witness(s: float) -> LoopCurve:
    """The orbit t -> e^{ist} traversed at speed s, right-translated by j^{-1} into the chart.

    In the ambient R^4 it reads (0, 0, -cos st, -sin st); right translations
    are isometries preserving E_i, so action values are unchanged.
    """
    return LoopCurve(lambda t: np.array([0.0, -np.cos(s * t), -np.sin(s * t)]),
                     2 * np.pi / s,
                     lambda t: np.array([0.0, s * np.sin(s * t), -s * np.cos(s * t)]))
