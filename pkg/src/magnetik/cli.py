"""Command-line front end: ``magnetik verify|table|geodesic|mane|plot-fig2``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import flow
from . import geometries as geo
from . import suites
from .chart import DEFAULT_SEED, DEFAULT_STEPS, FDSteps, random_orthonormal, sample_points
from .errors import DomainExit, MagnetikError
from .magnetic import MagneticCurvature

TABLE_SYSTEMS = ("euclidean2-uniform", "euclidean3", "euclidean3-uniform", "euclidean3-static",
                 "s3-stereo", "s3-sigmai", "s3-2sigmai")
MANE_PRIMITIVES = {"s3-sigmai": 0.5, "s3-2sigmai": 1.0, "s3-stereo": 0.0}
FIG2_SAMPLES = 200


def default_seed() -> int:
    env = os.environ.get("MAGNETIK_SEED")
    return int(env) if env else DEFAULT_SEED


def fmt(x) -> str:
    return "%.17g" % float(x)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None):
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text, encoding="utf-8")


def _steps(args) -> FDSteps:
    return FDSteps(args.h1 if args.h1 is not None else DEFAULT_STEPS.h1,
                   args.h2 if args.h2 is not None else DEFAULT_STEPS.h2)


def _vector(text: str):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# --- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    report = suites.run_suite(args.suite, args.geometry, args.s, args.samples, args.seed, _steps(args), args.tol)
    _emit(_dump(report.to_dict(meta=not args.no_meta)), args.out)
    return 0 if report.passed else 1


# --- table ------------------------------------------------------------------

def _flat_B(key):
    return {"euclidean3": np.zeros(3), "euclidean3-uniform": np.array([0.0, 0.0, 1.0]),
            "euclidean3-static": np.array([0.0, 0.0, 0.7])}[key]


def closed_form(key, quantity, s, x, v, w):
    """Closed-form value of the magnetic curvature for the catalog systems, or None."""
    if key == "euclidean2-uniform":
        return 1.0
    if key.startswith("euclidean3"):
        B = _flat_B(key)
        if quantity == "mag-sec":
            return float(B @ np.cross(v, w)) ** 2 + 0.25 * float(B @ v) ** 2
        return float(B @ B) - 0.5 * float(B @ v) ** 2
    if key.startswith("s3"):
        # B = c E_i with curl B = 2c E_i, |B| = c, and sec = Ric / 2 = 1
        c = {"s3-stereo": 0.0, "s3-sigmai": 1.0, "s3-2sigmai": 2.0}[key]
        G = geo.s3_system(None).g(x)
        Ei = geo.s3_frame_chart(x)[0]
        gEv = float(Ei @ G @ v)
        if quantity == "mag-sec":
            vxw = np.sqrt(np.linalg.det(G)) * np.linalg.solve(G, np.cross(v, w))
            return s * s - s * c * gEv + (c * float(Ei @ G @ vxw)) ** 2 + 0.25 * (c * gEv) ** 2
        return 2 * s * s - 2 * s * c * gEv + c * c - 0.5 * (c * gEv) ** 2
    return None


def table_rows(quantity, key, s_values, samples, seed, direction="frame", steps=DEFAULT_STEPS):
    system = geo.system(key, steps)
    rng = np.random.default_rng(seed)
    pts = [np.zeros(system.dim)] + list(sample_points(system.patch, max(samples - 1, 0), rng=rng))
    rows = []
    for idx, x in enumerate(pts[:samples]):
        mc = MagneticCurvature(system, x)
        if direction == "frame" and key.startswith("s3"):
            E = geo.s3_frame_chart(x)
            v, w = E[0], E[1]
        elif direction == "frame":
            I = np.eye(system.dim)
            v, w = I[0], I[1]
        else:
            F = random_orthonormal(system.g, x, 2, rng)
            v, w = F[:, 0], F[:, 1]
        for s in s_values:
            val = mc.sec(s, v, w) if quantity == "mag-sec" else mc.ric(s, v)
            ref = closed_form(key, quantity, s, x, v, w)
            rows.append((s, idx, x, val, ref, None if ref is None else abs(val - ref)))
    return rows


def cmd_table(args) -> int:
    s_values = args.s or [0.0, 0.25, 0.5, 1.0]
    rows = table_rows(args.quantity, args.geometry, s_values, args.samples, args.seed, args.direction, _steps(args))
    dim = len(rows[0][2]) if rows else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "sample"] + [f"x{i}" for i in range(dim)] + ["value", "closed_form", "abs_diff"])
    for s, idx, x, val, ref, diff in rows:
        w.writerow([fmt(s), idx] + [fmt(c) for c in x] + [fmt(val), "" if ref is None else fmt(ref),
                                                           "" if diff is None else fmt(diff)])
    _emit(buf.getvalue(), args.out)
    return 0


# --- geodesic ---------------------------------------------------------------

def cmd_geodesic(args) -> int:
    system = geo.system(args.geometry, _steps(args))
    n = system.dim
    x0 = args.x0 if args.x0 is not None else np.zeros(n)
    v0 = args.v0 if args.v0 is not None else np.eye(n)[0]
    if len(x0) != n or len(v0) != n:
        raise SystemExit(f"x0 and v0 need {n} components for {args.geometry}")
    if args.s is not None:
        v0 = v0 * (args.s[0] / flow.speed(system, x0, v0))
    conserved = {f"g(v,E{a})": flow.frame_momentum(a) for a in "ijk"} if args.geometry.startswith("s3") else {}
    code = 0
    try:
        traj = flow.integrate(system, x0, v0, args.T, args.dt, conserved)
    except DomainExit as exc:
        traj = exc.trajectory
        code = 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            (traj.to_json if args.out.endswith(".json") else traj.to_csv)(fh)
    summary = {
        "schema": 1,
        "geometry": args.geometry,
        "steps": len(traj) - 1,
        "dt": traj.dt,
        "exited": traj.exited,
        "final_position": [float(c) for c in traj.final_position],
        "speed_drift": traj.speed_drift(),
        "conserved_drift": {k: traj.conserved_drift(k) for k in traj.conserved},
        "final_chart": None if traj.charts[-1] is None else [float(c) for c in traj.charts[-1]],
        "recenterings": len(traj.recenterings),
    }
    sys.stdout.write(_dump(summary))
    return code


# --- mane -------------------------------------------------------------------

def cmd_mane(args) -> int:
    system = geo.system(args.geometry, _steps(args))
    scale = MANE_PRIMITIVES[args.geometry]
    theta = (flow.s3_theta_primitive(system, "i", scale) if scale else flow.zero_primitive(system))
    bracket = flow.mane_estimate(system, theta, flow.s3_circle_witness)
    out = {"schema": 1, "geometry": args.geometry, **bracket.to_dict(), "width": bracket.width}
    _emit(_dump(out), args.out)
    return 0


# --- fig2 plot ------------------------------------------------------------

def fig2_data(n=FIG2_SAMPLES, steps=DEFAULT_STEPS):
    """(s, Ric_s(E_i) from the generic pipeline, 2(s - 1/2)^2) for s = 2k/n, k = 1..n."""
    s = 2.0 * np.arange(1, n + 1) / n
    system = geo.s3_system("i", steps=steps)
    x = np.zeros(3)
    mc = MagneticCurvature(system, x)
    Ei = geo.s3_frame_chart(x)[0]
    ric = np.array([mc.ric(si, Ei) for si in s])
    return s, ric, 2 * (s - 0.5) ** 2


def cmd_plot_fig2(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    s, ric, ref = fig2_data(steps=_steps(args))
    out = Path(args.out)
    with plt.rc_context({"svg.hashsalt": "magnetik", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(s, ric, color="tab:blue", label=r"Ric$_s(E_i)$, generic pipeline")
        ax.plot(s, ref, color="k", linestyle=":", label=r"$2(s-1/2)^2$")
        ax.plot([0.5], [0.0], "o", color="tab:red", label="minimum at s = 1/2")
        ax.set_xlabel("s")
        ax.set_ylabel("lower bound of magnetic Ricci curvature")
        ax.set_xlim(0, 2)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    sidecar = out.with_suffix(".csv")
    with open(sidecar, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "ric_generic", "closed_form"])
        for row in zip(s, ric, ref):
            w.writerow([fmt(c) for c in row])
    sys.stdout.write(_dump({"schema": 1, "svg": str(out), "csv": str(sidecar),
                            "max_abs_diff": float(np.max(np.abs(ric - ref)))}))
    return 0


# --- parser -----------------------------------------------------------------

def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=default_seed())
    p.add_argument("--h1", type=float, default=None, help="first-derivative FD step")
    p.add_argument("--h2", type=float, default=None, help="second-derivative FD step")
    p.add_argument("--out", default=None, help="also write the output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magnetik", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=suites.SUITES + ("all",))
    p.add_argument("--geometry", action="append", choices=geo.SUBMANIFOLDS,
                   help="restrict submanifold sweeps (repeatable)")
    p.add_argument("--s", type=float, action="append", help="energy value (repeatable)")
    p.add_argument("--samples", type=int, default=suites.DEFAULT_SAMPLES)
    p.add_argument("--tol", type=float, default=None, help="override every residual tolerance")
    p.add_argument("--no-meta", action="store_true", help="omit timestamps and wall time")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="magnetic sectional or Ricci curvature table (CSV)")
    p.add_argument("quantity", choices=("mag-sec", "mag-ric"))
    p.add_argument("--geometry", choices=TABLE_SYSTEMS, default="s3-sigmai")
    p.add_argument("--s", type=float, action="append")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--direction", choices=("frame", "random"), default="frame")
    _add_common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("geodesic", help="integrate a magnetic geodesic")
    p.add_argument("--geometry", choices=tuple(geo.SYSTEMS), default="s3-sigmai")
    p.add_argument("--x0", type=_vector)
    p.add_argument("--v0", type=_vector)
    p.add_argument("--s", type=float, action="append", help="rescale v0 to this speed")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("mane", help="bracket the Mañé critical value")
    p.add_argument("--geometry", choices=tuple(MANE_PRIMITIVES), default="s3-sigmai")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_mane)

    p = sub.add_parser("plot-fig2", help="plot Ric_s(E_i) against 2(s - 1/2)^2")
    p.add_argument("--out", default="fig2.svg")
    p.add_argument("--h1", type=float, default=None)
    p.add_argument("--h2", type=float, default=None)
    p.set_defaults(func=cmd_plot_fig2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "h1", None) is not None and args.h1 <= 0 or getattr(args, "h2", None) is not None and args.h2 <= 0:
        parser.error("FD steps must be positive")
    if getattr(args, "samples", 1) < 1:
        parser.error("--samples must be at least 1")
    try:
        return args.func(args)
    except (MagnetikError, OSError) as exc:
        sys.stderr.write(f"magnetik: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
