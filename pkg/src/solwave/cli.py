"""Batch front-end: config ingestion, one subcommand per workflow.

Subcommands
-----------
continue     trace a branch from the small-amplitude seed; writes
             branch.csv, diagnostics.ndjson, solution_final.json
invariants   recompute every diagnostic check on a stored solution and
             print a pass/fail table
conjugate    conjugate-flow quantities for a (gamma, alpha) pair
dispersion   root of the linear dispersion relation, if any
reduced-ode  RK4 phase-portrait samples of the reduced center-manifold ODE
profile      physical-plane surface and velocity field of a stored solution

Configuration is JSON (--config); unknown keys are rejected.  Scalar
fields can be overridden from the environment with the SOLWAVE_ prefix,
nested fields with double underscores (e.g. SOLWAVE_CONTINUATION__MAX_STEPS).
Exit codes: 0 success, 2 solver failure, 64 bad configuration or usage,
66 missing/unreadable input file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import diagnostics as diag
from .asymptotics import (
    dispersion_root,
    explicit_homoclinic,
    explicit_homoclinic_slope,
    integrate_reduced_ode,
)
from .continuation import (
    Branch,
    BranchConfig,
    MonitorThresholds,
    NewtonDivergenceError,
    NewtonSettings,
    SingularJacobianError,
    TrivialBranchError,
    run_branch,
)
from .persistence import (
    atomic_write_text,
    load_solution,
    save_solution,
    write_branch_csv,
    write_diagnostics_ndjson,
)
from .wave_operator import Parameters, ReducedState, residual, surface_fields
from .strip_harmonics import ModeBasis
from .asymptotics import seed_alpha, seed_profile

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_CONFIG = 64
EXIT_NOINPUT = 66

ENV_PREFIX = "SOLWAVE_"

CONFIG_SCHEMA_VERSION = 1

_CONFIG_SPEC = {
    "schema_version": int,
    "gamma": float,
    "eps0": float,
    "basis": {"L": float, "N": int},
    "newton": {"tol_residual": float, "max_iter": int, "damping": float,
               "polish_iters": int},
    "continuation": {
        "h0": float, "h_min": float, "h_max": float, "max_steps": int,
        "thresholds": {"m_min": float, "alpha_min": float, "froude_max": float},
    },
    "output_dir": str,
    "seed": int,
    "scan_stagnation": bool,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    branch: BranchConfig
    output_dir: str
    seed: int  # for randomized tests only; the solver itself is deterministic


def _check_keys(doc: dict, spec: dict, path: str = "") -> None:
    for key, val in doc.items():
        here = f"{path}.{key}" if path else key
        if key not in spec:
            raise ConfigError(f"unknown config field: {here}")
        want = spec[key]
        if isinstance(want, dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config field {here} must be an object")
            _check_keys(val, want, here)
        elif want is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"config field {here} must be a number")
        elif want is int:
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"config field {here} must be an integer")
        elif want is bool:
            if not isinstance(val, bool):
                raise ConfigError(f"config field {here} must be a boolean")
        elif want is str:
            if not isinstance(val, str):
                raise ConfigError(f"config field {here} must be a string")


def _apply_env_overrides(doc: dict, environ) -> None:
    """SOLWAVE_FOO=1 overrides doc['foo']; __ descends into objects."""
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        parts = [p.lower() for p in name[len(ENV_PREFIX):].split("__")]
        node, spec = doc, _CONFIG_SPEC
        for p in parts[:-1]:
            if not isinstance(spec.get(p), dict):
                raise ConfigError(f"unknown config field from {name}")
            node = node.setdefault(p, {})
            spec = spec[p]
        leaf = parts[-1]
        want = spec.get(leaf)
        if want is None or isinstance(want, dict):
            raise ConfigError(f"unknown config field from {name}")
        try:
            if want is bool:
                node[leaf] = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                node[leaf] = want(raw)
        except ValueError as err:
            raise ConfigError(f"bad value for {name}: {err}") from err


def parse_run_config(path: str, out_override: str | None = None,
                     environ=None) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as err:
        raise FileNotFoundError(path) from err
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot parse config {path}: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _apply_env_overrides(doc, environ if environ is not None else os.environ)
    _check_keys(doc, _CONFIG_SPEC)
    version = doc.get("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema_version: {version}")
    if "gamma" not in doc:
        raise ConfigError("config must set gamma")

    basis = doc.get("basis", {})
    newton = doc.get("newton", {})
    cont = doc.get("continuation", {})
    thr = cont.get("thresholds", {})
    try:
        branch = BranchConfig(
            gamma=float(doc["gamma"]),
            eps0=float(doc.get("eps0", 0.01)),
            basis_L=float(basis.get("L", 64.0)),
            basis_N=int(basis.get("N", 256)),
            newton=NewtonSettings(
                tol_residual=float(newton.get("tol_residual", 1e-10)),
                max_iter=int(newton.get("max_iter", 25)),
                damping=float(newton.get("damping", 0.5)),
                polish_iters=int(newton.get("polish_iters", 1)),
            ),
            h0=float(cont.get("h0", 0.05)),
            h_min=float(cont.get("h_min", 1e-8)),
            h_max=float(cont.get("h_max", 1.0)),
            max_steps=int(cont.get("max_steps", 400)),
            thresholds=MonitorThresholds(
                m_min=float(thr.get("m_min", 1e-2)),
                alpha_min=float(thr.get("alpha_min", 1e-3)),
                froude_max=float(thr.get("froude_max", 1e3)),
            ),
            scan_stagnation=bool(doc.get("scan_stagnation", False)),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err
    out = out_override or doc.get("output_dir", ".")
    return RunConfig(branch=branch, output_dir=out, seed=int(doc.get("seed", 0)))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_continue(args) -> int:
    try:
        cfg = parse_run_config(args.config, args.out)
    except FileNotFoundError as err:
        print(f"error: config file not found: {err}", file=sys.stderr)
        return EXIT_NOINPUT
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(cfg.output_dir, exist_ok=True)
    try:
        branch = run_branch(cfg.branch)
    except (NewtonDivergenceError, SingularJacobianError, TrivialBranchError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    write_branch_csv(os.path.join(cfg.output_dir, "branch.csv"), branch)
    write_diagnostics_ndjson(
        os.path.join(cfg.output_dir, "diagnostics.ndjson"), branch)
    save_solution(os.path.join(cfg.output_dir, "solution_final.json"),
                  branch.points[-1].state)
    last = branch.points[-1]
    print(f"branch: {len(branch.points)} points, terminated: {branch.reason.value}")
    m = last.diagnostics.monitor
    print(f"final: alpha={last.alpha:.8g} F={last.state.params.froude:.8g} "
          f"crest_w1={last.state.crest_value():.8g} "
          f"m=({m.m1:.4g}, {m.m2:.4g}, {m.m3:.4g})")
    return EXIT_OK if branch.reason.is_clean else EXIT_SOLVER


_INVARIANT_TOL = {
    "residual_sup": 1e-8,
    "flow_force_spread_rel": 1e-8,
    "phi_identity": 1e-6,
    "integral_identity": 1e-6,
    "complementing_rel": 1e-10,
    "velocity_dynamic": 1e-9,
    "velocity_kinematic": 1e-9,
}


def solution_invariants(state: ReducedState) -> list:
    """(name, value, threshold, ok) rows for every analytic check."""
    from .wave_operator import complementing_identity, lopatinskii_constant

    f = surface_fields(state)
    rows = []
    res = float(np.max(np.abs(residual(state, f))))
    rows.append(("residual_sup", res, _INVARIANT_TOL["residual_sup"],
                 res <= _INVARIANT_TOL["residual_sup"]))

    vals, spread = diag.flow_force_spread(state)
    rel = spread / max(1.0, abs(float(np.mean(vals))))
    rows.append(("flow_force_spread_rel", rel,
                 _INVARIANT_TOL["flow_force_spread_rel"],
                 rel <= _INVARIANT_TOL["flow_force_spread_rel"]))

    phi = diag.phi_surface_check(state)
    rows.append(("phi_identity", phi, _INVARIANT_TOL["phi_identity"],
                 phi <= _INVARIANT_TOL["phi_identity"]))

    ii = diag.integral_identity_check(state, f)
    rows.append(("integral_identity", ii, _INVARIANT_TOL["integral_identity"],
                 ii <= _INVARIANT_TOL["integral_identity"]))

    comp = complementing_identity(state, f)
    rows.append(("complementing_rel", comp, _INVARIANT_TOL["complementing_rel"],
                 comp <= _INVARIANT_TOL["complementing_rel"]))

    lam = lopatinskii_constant(state, f)
    rows.append(("lopatinskii_positive", lam, 0.0, lam > 0.0))

    p = state.params
    rows.append(("supercritical", p.alpha, p.alpha_cr, p.alpha < p.alpha_cr))

    nr = diag.nodal_check(state)
    rows.append(("nodal", float(nr.worst_value), 1e-12, nr.ok))

    psi_ok = diag.psi_bound_check(state, f)
    rows.append(("psi_bound", float(psi_ok), 0.5, psi_ok))

    # pointwise velocity-form boundary conditions on Gamma
    b = state.basis
    xs = b.nodes
    u, v = diag.velocity(state, xs, np.ones_like(xs))
    eta = 1.0 + f.w1
    dyn = float(np.max(np.abs(u * u + v * v + 2.0 * p.alpha * (eta - 1.0) - 1.0)))
    rows.append(("velocity_dynamic", dyn, _INVARIANT_TOL["velocity_dynamic"],
                 dyn <= _INVARIANT_TOL["velocity_dynamic"]))
    kin = float(np.max(np.abs(u * f.w1x - v * (1.0 + f.w1y))))
    rows.append(("velocity_kinematic", kin, _INVARIANT_TOL["velocity_kinematic"],
                 kin <= _INVARIANT_TOL["velocity_kinematic"]))
    return rows


def cmd_invariants(args) -> int:
    try:
        state = load_solution(args.solution)
    except FileNotFoundError:
        print(f"error: no such solution file: {args.solution}", file=sys.stderr)
        return EXIT_NOINPUT
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        print(f"error: unreadable solution file: {err}", file=sys.stderr)
        return EXIT_NOINPUT
    rows = solution_invariants(state)
    width = max(len(r[0]) for r in rows)
    all_ok = True
    for name, value, threshold, ok in rows:
        all_ok &= ok
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {value: .6e}  (limit {threshold:g})  {status}")
    print("all checks passed" if all_ok else "SOME CHECKS FAILED")
    return EXIT_OK if all_ok else 1


def cmd_conjugate(args) -> int:
    try:
        params = Parameters(args.gamma, args.alpha)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    dcr = diag.d_critical(params)
    print(f"gamma={params.gamma:g} alpha={params.alpha:g} "
          f"alpha_cr={params.alpha_cr:g}")
    print(f"d_cr (argmin of qhat) = {dcr:.12g}")
    try:
        dstar = diag.conjugate_depth(params)
    except diag.DegenerateConjugateFlowError:
        print("degenerate: alpha = alpha_cr, conjugate depth merges with d = 1")
        return EXIT_OK
    print(f"d_*  (conjugate depth) = {dstar:.12g}")
    print(f"{'d':>8}  {'qhat(d)':>18}  {'shat(d)':>18}")
    for d in (0.5, 1.0, dcr, dstar, 2.0 * dstar):
        print(f"{d:8.4f}  {diag.qhat(d, params):18.12g}  "
              f"{diag.shat(d, params):18.12g}")
    s1, sstar = diag.shat(1.0, params), diag.shat(dstar, params)
    if params.alpha < params.alpha_cr:
        verdict = "holds" if sstar > s1 else "VIOLATED"
        print(f"shat(d_*) > shat(1): {sstar:.12g} > {s1:.12g} -> {verdict}")
    else:
        verdict = "holds" if sstar < s1 else "VIOLATED"
        print(f"shat(d_*) < shat(1): {sstar:.12g} < {s1:.12g} -> {verdict}")
    return EXIT_OK


def cmd_dispersion(args) -> int:
    root = dispersion_root(args.gamma, args.alpha)
    doc = {"gamma": args.gamma, "alpha": args.alpha,
           "gamma_plus_alpha": args.gamma + args.alpha,
           "k": root.k, "at_cutoff": root.at_cutoff}
    if root.k is None:
        msg = ("at the long-wave cutoff (k = 0)" if root.at_cutoff
               else "no real wavenumber (gamma + alpha < 1)")
        print(msg)
    else:
        print(f"k = {root.k:.15g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        atomic_write_text(os.path.join(args.out, "dispersion.json"),
                          json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_reduced_ode(args) -> int:
    if args.step <= 0:
        print("error: --step must be positive", file=sys.stderr)
        return EXIT_CONFIG
    if args.q0 is None or args.p0 is None:
        q0 = explicit_homoclinic(args.gamma, args.x0)
        p0 = explicit_homoclinic_slope(args.gamma, args.x0)
    else:
        q0, p0 = args.q0, args.p0
    traj = integrate_reduced_ode(q0, p0, args.gamma, (args.x0, args.x1), args.step)
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["X", "Q", "P"]
    scale = args.eps if args.eps and args.eps > 0 else None
    if scale:
        header += ["x_unscaled", "w1_unscaled"]
    writer.writerow(header)
    for X, Q, P in traj:
        row = [repr(float(X)), repr(float(Q)), repr(float(P))]
        if scale:
            row += [repr(float(X / np.sqrt(scale))), repr(float(scale * Q))]
        writer.writerow(row)
    os.makedirs(args.out, exist_ok=True)
    atomic_write_text(os.path.join(args.out, "reduced_ode.csv"), buf.getvalue())
    print(f"wrote {len(traj)} samples to {os.path.join(args.out, 'reduced_ode.csv')}")
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        state = load_solution(args.solution)
    except FileNotFoundError:
        print(f"error: no such solution file: {args.solution}", file=sys.stderr)
        return EXIT_NOINPUT
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        print(f"error: unreadable solution file: {err}", file=sys.stderr)
        return EXIT_NOINPUT
    os.makedirs(args.out, exist_ok=True)

    surf = diag.reconstruct_surface(state, n_samples=args.samples)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["X", "Y"])
    for X, Y in zip(surf.X, surf.Y):
        writer.writerow([repr(float(X)), repr(float(Y))])
    atomic_write_text(os.path.join(args.out, "profile.csv"), buf.getvalue())

    b = state.basis
    xs = np.linspace(-b.L, b.L, 2 * args.grid + 1)
    ys = np.linspace(1.0 / (args.grid + 1), 1.0, args.grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    u, v = diag.velocity(state, X, Y)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "y", "u", "v"])
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            writer.writerow([repr(float(X[i, j])), repr(float(Y[i, j])),
                             repr(float(u[i, j])), repr(float(v[i, j]))])
    atomic_write_text(os.path.join(args.out, "velocity.csv"), buf.getvalue())

    scan = diag.stagnation_scan(state)
    summary = {
        "overhang": surf.overhang,
        "crest_height": float(np.max(surf.Y)),
        "crest_speed_sq": scan.crest_speed_sq,
        "min_speed_sq": scan.min_speed_sq,
        "stagnation_points": [list(p) for p in scan.stagnation_points],
        "critical_layer_crossings": len(scan.critical_layer_crossings),
    }
    atomic_write_text(os.path.join(args.out, "profile_summary.json"),
                      json.dumps(summary, indent=1) + "\n")
    print(f"overhang: {surf.overhang}; crest height {summary['crest_height']:.8g}; "
          f"{len(scan.stagnation_points)} near-stagnation points")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="solwave",
        description="solitary waves with constant vorticity: spectral "
                    "continuation and diagnostics",
        epilog=f"environment overrides: {ENV_PREFIX}<FIELD>[__<SUBFIELD>], "
               f"e.g. {ENV_PREFIX}CONTINUATION__MAX_STEPS=10",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("continue", help="trace a solution branch")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default=None, help="output directory override")
    p.set_defaults(func=cmd_continue)

    p = sub.add_parser("invariants", help="check a stored solution")
    p.add_argument("solution", help="solution JSON file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("conjugate", help="conjugate-flow table")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("dispersion", help="linear dispersion root")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("reduced-ode", help="phase-portrait samples")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eps", type=float, default=None,
                   help="if set, also emit unscaled (x, w1) columns")
    p.add_argument("--x0", type=float, default=-10.0)
    p.add_argument("--x1", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--q0", type=float, default=None,
                   help="initial Q (default: on the explicit homoclinic)")
    p.add_argument("--p0", type=float, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_reduced_ode)

    p = sub.add_parser("profile", help="physical-plane reconstruction")
    p.add_argument("solution", help="solution JSON file")
    p.add_argument("--out", default=".")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--grid", type=int, default=32)
    p.set_defaults(func=cmd_profile)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on usage errors; remap to the config exit code
        return EXIT_CONFIG if err.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
