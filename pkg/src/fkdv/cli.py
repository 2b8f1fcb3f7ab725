"""Command-line front end: classify, reduce, solve, exact, verify, transform.

Every command prints a JSON report (schema field = 1, floats rendered with 17
significant digits) and writes a manifest echoing the merged inputs, library
versions and results, so a run can be reproduced exactly.  Configuration
precedence: command-line flags > TOML file given with --config > built-in
defaults.  FKDV_THREADS (positive integer) caps internal parallelism; the
numerical kernels are single-threaded, so any cap is honored trivially and the
value is recorded in the manifest.

Exit codes: 0 success, 1 validation or parse failure, 2 inconclusive
classification rank, 3 numerical failure (blow-up, quadrature breakdown).
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .equivalence import (
    EquationSpec,
    MobiusEquivalence,
    gauge_to_alpha_zero,
    is_reducible_to_constant,
    map_to_constant,
)
from .exactsol import Cn4Params, cn4_equation, cn4_field
from .exprcalc import ParseError, SmoothFn, eval_expr, parse
from .pdesolve import (
    BlowUpError,
    Field,
    Grid1D,
    SolverConfig,
    callable_residual,
    read_fields_csv,
    solve,
    spectral_residual,
    write_fields_csv,
)
from .reduction import (
    CASE_LABELS,
    SubalgebraSpec,
    build_reduction,
    degenerate_solution,
    integrate_reduced,
    reconstruct,
)
from .symmetry import (
    Generator,
    InconclusiveRankError,
    classify,
    ungauged_basis,
    verify_invariance_by_flow,
)


# ---------------------------------------------------------------------------
# JSON with deterministic 17-significant-digit floats


def _to_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = ", ".join(_to_json(v, indent + 1) for v in seq)
        return "[" + items + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return json.dumps(str(v))
        return format(v, ".17g")
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def emit(report, out_path=None):
    text = _to_json(report) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)


def write_manifest(prefix, command, inputs, results):
    manifest = {
        "schema": 1,
        "command": command,
        "inputs": inputs,
        "versions": {
            "fkdv": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "threads_cap": _threads_cap(),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "results": results,
    }
    path = f"{prefix}.manifest.json"
    with open(path, "w") as fh:
        fh.write(_to_json(manifest) + "\n")
    return path


def _threads_cap():
    raw = os.environ.get("FKDV_THREADS")
    if raw is None:
        return None
    try:
        val = int(raw)
        if val < 1:
            raise ValueError
    except ValueError:
        raise ValueError(f"FKDV_THREADS must be a positive integer, got {raw!r}") from None
    return val


# ---------------------------------------------------------------------------
# Flag / TOML / default merging


def _load_toml(path):
    try:
        import tomllib as toml_mod
    except ImportError:
        import tomli as toml_mod
    with open(path, "rb") as fh:
        return toml_mod.load(fh)


def merge_config(args, command, defaults):
    """flags > [command] section of the TOML file > defaults."""
    cfg = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        section = _load_toml(config_path).get(command, {})
        for key, val in section.items():
            key = key.replace("-", "_")
            if key not in defaults:
                raise ValueError(f"unknown key {key!r} in [{command}] of {config_path}")
            cfg[key] = val
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _spec_from_cfg(cfg):
    interval = (float(cfg["t_lo"]), float(cfg["t_hi"]))
    t_ref = float(cfg["t_ref"]) if cfg.get("t_ref") is not None else None
    return EquationSpec.from_text(cfg["alpha"], cfg["beta"], interval=interval, t_ref=t_ref)


def _floats(text, n=None):
    vals = [float(v) for v in str(text).split(",")]
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated values, got {len(vals)}")
    return vals


def _span(text):
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ValueError("span must look like lo:hi")
    return float(parts[0]), float(parts[1])


def _generator_summary(result):
    out = []
    for g in result.basis:
        out.append({"c": [g.c0, g.c1, g.c2, g.c3, g.c4, g.c5], "pretty": g.describe()})
    return out


# ---------------------------------------------------------------------------
# Commands


CLASSIFY_DEFAULTS = {
    "alpha": "0", "beta": "1", "t_lo": 0.5, "t_hi": 5.0, "t_ref": None,
    "samples": 64, "out": "fkdv-classify",
}


def cmd_classify(args):
    cfg = merge_config(args, "classify", CLASSIFY_DEFAULTS)
    eq = _spec_from_cfg(cfg)
    if eq.is_alpha_zero():
        result = classify(eq.beta, samples=int(cfg["samples"]))
        table2 = None
    else:
        gauged, _ = gauge_to_alpha_zero(eq)
        result = classify(gauged.beta, samples=int(cfg["samples"]))
        gens = ungauged_basis(eq, result=result)
        ts = np.linspace(eq.t_lo + 0.1 * (eq.t_hi - eq.t_lo),
                         eq.t_hi - 0.1 * (eq.t_hi - eq.t_lo), 5)
        table2 = [
            {

                "label": g.label,
                "samples": [
                    {"t": float(t), "tau": float(g.tau(t)), "xi(t,1)": float(g.xi(t, 1.0)),
                     "eta(t,1,1)": float(g.eta(t, 1.0, 1.0))}
                    for t in ts
                ],
            }
            for g in gens
        ]
    report = {
        "schema": 1,
        "command": "classify",
        "extension_dim": result.extension_dim,
        "case": result.case_tag,
        "case_index": result.case_index,
        "parameters": {"rho": result.rho, "nu": result.nu, "lambda": result.lam},
        "nullspace_residual": result.nullspace_residual,
        "basis": _generator_summary(result),
        "table2_basis": table2,
    }
    emit(report)
    write_manifest(cfg["out"], "classify", cfg, report)
    return 0


REDUCE_DEFAULTS = {
    "case": None, "subalgebra": None, "rho": None, "nu": None, "a": None,
    "sigma": None, "phi0": None, "ic": None, "span": None,
    "rel_tol": 1e-9, "abs_tol": 1e-12, "grid_n": 64,
    "t_window": None, "out": "fkdv-reduce",
}


def cmd_reduce(args):
    cfg = merge_config(args, "reduce", REDUCE_DEFAULTS)
    if cfg["case"] is None or cfg["subalgebra"] is None:
        raise ValueError("reduce needs --case and --subalgebra")
    case = int(cfg["case"])
    label = str(cfg["subalgebra"])
    if case not in CASE_LABELS:
        raise ValueError(f"case must be one of {sorted(CASE_LABELS)}")
    allowed = set(CASE_LABELS[case]) | ({"g1.2"} if case == 1 else set())
    if label not in allowed:
        raise ValueError(f"subalgebra {label!r} does not belong to case {case}; "
                         f"choose from {sorted(allowed)}")
    spec = SubalgebraSpec(
        case, label,
        a=None if cfg["a"] is None else float(cfg["a"]),
        sigma=None if cfg["sigma"] is None else int(cfg["sigma"]),
        rho=None if cfg["rho"] is None else float(cfg["rho"]),
        nu=None if cfg["nu"] is None else float(cfg["nu"]),
    )
    recipe = build_reduction(spec)

    span = _span(cfg["span"]) if cfg["span"] is not None else (0.0, 2.0)
    if recipe.order == 1:
        if cfg["phi0"] is None:
            raise ValueError("the boost reduction needs --phi0")
        ic = float(cfg["phi0"])
    else:
        if cfg["ic"] is None:
            raise ValueError("fifth-order reductions need --ic v,v,v,v,v")
        ic = np.array(_floats(cfg["ic"], 5))
    traj = integrate_reduced(recipe, ic=ic, span=span,
                             rel_tol=float(cfg["rel_tol"]), abs_tol=float(cfg["abs_tol"]))
    csv_path = f"{cfg['out']}.trajectory.csv"
    traj.to_csv(csv_path)

    residual = None
    window_used = None
    try:
        t_window = (_span(cfg["t_window"]) if cfg["t_window"] is not None
                    else _default_reduce_window(recipe))
        ts = np.linspace(t_window[0], t_window[1], 5)
        grid = _fitting_grid(recipe, traj, ts, int(cfg["grid_n"]))
        if grid is not None:
            _, residual = reconstruct(recipe, traj, grid, t_window=ts,
                                      beta=None if recipe.beta_text else _any_beta(ts))
            window_used = [float(t_window[0]), float(t_window[1])]
    except ValueError:
        residual = None

    report = {
        "schema": 1,
        "command": "reduce",
        "subalgebra": label,
        "order": recipe.order,
        "parameters": recipe.params,
        "span": list(traj.span),
        "steps": traj.steps,
        "rejected_steps": traj.rejected,
        "trajectory_csv": csv_path,
        "reconstruction_residual": residual,
        "reconstruction_window": window_used,
    }
    emit(report)
    write_manifest(cfg["out"], "reduce", cfg, report)
    return 0


def _default_reduce_window(recipe):
    lo = 1.0 if recipe.label in ("g1.1", "g1.2") else 0.0
    return (lo, lo + 0.1)


def _any_beta(ts):
    lo, hi = float(np.min(ts)) - 0.5, float(np.max(ts)) + 0.5
    return SmoothFn.from_text("1", interval=(lo, hi), t_ref=lo)


def _fitting_grid(recipe, traj, ts, n):
    lo_s, hi_s = sorted(traj.span)
    margin = 0.02 * (hi_s - lo_s)
    L = None
    for t in ts:
        W = float(recipe.W(t))
        V = float(recipe.V(t))
        if W <= 0:
            return None
        cap = (hi_s - margin - V) / W
        if V < lo_s + margin or cap <= 0:
            return None
        L = cap if L is None else min(L, cap)
    n = max(16, 2 ** int(np.floor(np.log2(n))))
    return Grid1D(L=float(L), N=n)


SOLVE_DEFAULTS = {
    "alpha": "0", "beta": "1", "t_lo": None, "t_hi": None, "t_ref": None,
    "t0": 0.0, "t_end": 0.1, "dt": 1e-3, "L": 6.283185307179586, "N": 128,
    "u0": "0.1*sin(2*pi*x/6.283185307179586)", "monitor_stride": 10,
    "no_dealias": False, "gamma": 1.5, "out": "fkdv-solve",
}


def cmd_solve(args):
    cfg = merge_config(args, "solve", SOLVE_DEFAULTS)
    t0, t_end = float(cfg["t0"]), float(cfg["t_end"])
    lo = float(cfg["t_lo"]) if cfg["t_lo"] is not None else min(t0, t_end) - 1e-9
    hi = float(cfg["t_hi"]) if cfg["t_hi"] is not None else max(t0, t_end) + 1e-9
    eq = EquationSpec.from_text(cfg["alpha"], cfg["beta"], interval=(lo, hi),
                                t_ref=float(cfg["t_ref"]) if cfg["t_ref"] is not None else None)
    grid = Grid1D(L=float(cfg["L"]), N=int(cfg["N"]))
    u0_expr = parse(str(cfg["u0"]), var="x")
    u0 = Field(t=t0, values=np.asarray(eval_expr(u0_expr, grid.x), dtype=float)
               * np.ones(grid.N), grid=grid)
    config = SolverConfig(dt=float(cfg["dt"]), t_end=t_end,
                          dealias=not cfg["no_dealias"],
                          monitor_stride=int(cfg["monitor_stride"]),
                          density3_gamma=float(cfg["gamma"]))
    fields, log = solve(u0, eq, config)
    fields_path = f"{cfg['out']}.fields.csv"
    monitors_path = f"{cfg['out']}.monitors.csv"
    write_fields_csv(fields_path, fields)
    log.to_csv(monitors_path)
    report = {
        "schema": 1,
        "command": "solve",
        "snapshots": len(fields),
        "steps": int(round((t_end - t0) / config.dt)),
        "fields_csv": fields_path,
        "monitors_csv": monitors_path,
        "mass_drift": abs(log.mass[-1] - log.mass[0]),
        "momentum2_relative_drift": (
            abs(log.momentum2[-1] - log.momentum2[0]) / abs(log.momentum2[0])
            if log.momentum2[0] else None),
    }
    emit(report)
    write_manifest(cfg["out"], "solve", cfg, report)
    return 0


EXACT_DEFAULTS = {
    "alpha": "0", "t_lo": 0.0, "t_hi": 2.0, "t_ref": None,
    "c1": 0.0, "c2": 1.0, "a": 1.0, "b": 0.0, "d": 0.0,
    "t0": 0.5, "snapshots": 3, "dt": 1e-4, "N": 128,
    "check": False, "out": "fkdv-exact",
}


def cmd_exact(args):
    cfg = merge_config(args, "exact", EXACT_DEFAULTS)
    which = args.family
    interval = (float(cfg["t_lo"]), float(cfg["t_hi"]))
    t_ref = float(cfg["t_ref"]) if cfg["t_ref"] is not None else None
    alpha = SmoothFn.from_text(cfg["alpha"], interval=interval, t_ref=t_ref)
    t0 = float(cfg["t0"])
    n_snap = max(3, int(cfg["snapshots"]) | 1)
    dt = float(cfg["dt"])

    if which == "cn4":
        params = Cn4Params(alpha=alpha, a=float(cfg["a"]), b=float(cfg["b"]),
                           d=float(cfg["d"]), c1=float(cfg["c1"]), c2=float(cfg["c2"]))
        field_fn = cn4_field(params)
        eq = cn4_equation(params)
        periodic = field_fn.is_periodic()
        residual = None
        if periodic:
            grid = Grid1D(L=field_fn.spatial_period(t0), N=int(cfg["N"]))
            snaps = [Field(t=t0 + i * dt, values=field_fn(t0 + i * dt, grid.x), grid=grid)
                     for i in range(n_snap)]
            if cfg["check"]:
                residual = spectral_residual(snaps, eq)
        else:
            grid = Grid1D(L=4.0, N=int(cfg["N"]))
            snaps = [Field(t=t0 + i * dt, values=field_fn(t0 + i * dt, grid.x), grid=grid)
                     for i in range(n_snap)]
            if cfg["check"]:
                residual = callable_residual(
                    field_fn, eq, ts=[t0], xs=np.linspace(0.5, 3.5, 9), dt=2e-3, dx=0.05)
        extra = {"periodic": periodic, "spatial_period": field_fn.spatial_period(t0)}
    elif which == "degenerate":
        sol = degenerate_solution(alpha, a=float(cfg["a"]), b=float(cfg["b"]))
        sol.check_window(np.linspace(interval[0] + 0.05, interval[1] - 0.05, 9))
        eq = EquationSpec.from_text(cfg["alpha"], "1", interval=interval, t_ref=t_ref)
        grid = Grid1D(L=4.0, N=int(cfg["N"]))
        snaps = [Field(t=t0 + i * dt, values=sol(t0 + i * dt, grid.x), grid=grid)
                 for i in range(n_snap)]
        residual = None
        if cfg["check"]:
            residual = callable_residual(
                sol, eq, ts=[t0], xs=np.linspace(0.5, 3.5, 9), dt=1e-2, dx=0.5)
        extra = {}
    else:
        raise ValueError(f"unknown exact-solution family {which!r}")

    fields_path = f"{cfg['out']}.fields.csv"
    write_fields_csv(fields_path, snaps)
    report = {
        "schema": 1,
        "command": "exact",
        "family": which,
        "fields_csv": fields_path,
        "residual": residual,
        **extra,
    }
    emit(report)
    write_manifest(cfg["out"], "exact", cfg, report)
    return 0


VERIFY_DEFAULTS = {
    "generator": None, "alpha": "0", "beta": "1", "t_lo": None, "t_hi": None,
    "t_ref": None, "solution": None, "epsilon": 1e-2, "out": "fkdv-verify",
}


def cmd_verify(args):
    cfg = merge_config(args, "verify", VERIFY_DEFAULTS)
    if cfg["generator"] is None or cfg["solution"] is None:
        raise ValueError("verify needs --generator c0,c1,c2,c3,c4,c5 and --solution CSV")
    Q = Generator.from_coeffs(_floats(cfg["generator"], 6))
    fields = read_fields_csv(cfg["solution"])
    ts = [f.t for f in fields]
    lo = float(cfg["t_lo"]) if cfg["t_lo"] is not None else min(ts) - 1.0
    hi = float(cfg["t_hi"]) if cfg["t_hi"] is not None else max(ts) + 1.0
    eq = EquationSpec.from_text(cfg["alpha"], cfg["beta"], interval=(lo, hi),
                                t_ref=float(cfg["t_ref"]) if cfg["t_ref"] is not None else None)
    eps = float(cfg["epsilon"])
    r0 = verify_invariance_by_flow(Q, eq, fields, 0.0)
    r = verify_invariance_by_flow(Q, eq, fields, eps)
    report = {
        "schema": 1,
        "command": "verify",
        "epsilon": eps,
        "pre_flow_residual": r0,
        "residual": r,
        "ratio": r / r0 if r0 else None,
    }
    emit(report)
    write_manifest(cfg["out"], "verify", cfg, report)
    return 0


TRANSFORM_DEFAULTS = {
    "alpha": "0", "beta": "1", "t_lo": 0.5, "t_hi": 5.0, "t_ref": None,
    "tol": 1e-6, "samples": 17, "abcd": "1,0,0,1", "e": "0,0,1",
    "out": "fkdv-transform",
}


def cmd_transform(args):
    cfg = merge_config(args, "transform", TRANSFORM_DEFAULTS)
    action = args.action
    eq = _spec_from_cfg(cfg)
    ts = eq.sample_points(int(cfg["samples"]))

    if action == "reduce-to-constant":
        rep = is_reducible_to_constant(eq, tol=float(cfg["tol"]))
        result = {
            "reducible": rep.reducible,
            "c1": rep.c1,
            "c2": rep.c2,
            "criterion_residual": rep.residual,
            "mu": rep.mu,
            "note": rep.note or None,
        }
        if rep.reducible:
            chain, mu = map_to_constant(eq, tol=float(cfg["tol"]))
            img = chain.apply_to_coefficients(eq)
            tis = img.sample_points(9)
            result["chain"] = chain.describe()
            result["mu"] = mu
            result["image_beta_max_error"] = float(np.max(np.abs(img.beta(tis) - mu)))
    elif action == "gauge":
        gauged, g = gauge_to_alpha_zero(eq)
        result = {
            "T": [float(g.T(t)) for t in ts],
            "t": list(map(float, ts)),
            "beta_hat_at_T": [float(gauged.beta(g.T(t))) for t in ts],
            "image_interval": list(gauged.interval),
        }
    elif action == "mobius":
        g = MobiusEquivalence(*_floats(cfg["abcd"], 4),
                              *(_floats(cfg["e"], 3)))
        img = g.apply_to_coefficients(eq)
        tis = img.sample_points(int(cfg["samples"]))
        result = {
            "tuple": list(g.tuple),
            "delta": g.delta,
            "image_interval": list(img.interval),
            "t_image": list(map(float, tis)),
            "beta_image": [float(img.beta(t)) for t in tis],
        }
    else:
        raise ValueError(f"unknown transform action {action!r}")

    report = {"schema": 1, "command": "transform", "action": action, **result}
    emit(report)
    write_manifest(cfg["out"], "transform", cfg, report)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    p = argparse.ArgumentParser(
        prog="fkdv",
        description="Group analysis of u_t + u u_x + alpha(t) u + beta(t) u_xxxxx = 0")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="TOML file; section [<command>] supplies defaults")
        sp.add_argument("--out", help="output prefix for reports and manifests")

    def add_spec(sp, with_interval=True):
        sp.add_argument("--alpha", help="damping coefficient, expression in t (default 0)")
        sp.add_argument("--beta", help="dispersion coefficient, expression in t")
        if with_interval:
            sp.add_argument("--t-lo", type=float, dest="t_lo", help="working interval start")
            sp.add_argument("--t-hi", type=float, dest="t_hi", help="working interval end")
        sp.add_argument("--t-ref", type=float, dest="t_ref",
                        help="quadrature basepoint (default: interval start)")

    sp = sub.add_parser("classify", help="symmetry-extension classification")
    add_spec(sp)
    sp.add_argument("--samples", type=int, help="classifying-matrix sample count (default 64)")
    add_common(sp)

    sp = sub.add_parser("reduce", help="similarity reduction and ODE integration")
    sp.add_argument("--case", type=int, help="classification case 0..4")
    sp.add_argument("--subalgebra", help="label: ga, gsigma, g0, g1.1, g1.2, g2, g3, g4.1, g4.2")
    sp.add_argument("--rho", type=float, help="power exponent (case 1)")
    sp.add_argument("--nu", type=float, help="rotation parameter (case 3)")
    sp.add_argument("--a", type=float, help="shift parameter (ga, g1.2)")
    sp.add_argument("--sigma", type=int, help="sign parameter (gsigma, g4.2)")
    sp.add_argument("--phi0", type=float, help="initial value for the first-order reduction")
    sp.add_argument("--ic", help="five comma-separated initial values phi..phi''''")
    sp.add_argument("--span", help="integration span lo:hi in omega")
    sp.add_argument("--rel-tol", type=float, dest="rel_tol")
    sp.add_argument("--abs-tol", type=float, dest="abs_tol")
    sp.add_argument("--grid-n", type=int, dest="grid_n", help="reconstruction grid size")
    sp.add_argument("--t-window", dest="t_window", help="reconstruction window lo:hi in t")
    add_common(sp)

    sp = sub.add_parser("solve", help="pseudospectral initial-value solve")
    add_spec(sp)
    sp.add_argument("--t0", type=float, help="initial time")
    sp.add_argument("--t-end", type=float, dest="t_end", help="final time")
    sp.add_argument("--dt", type=float, help="time step")
    sp.add_argument("--L", type=float, help="domain length")
    sp.add_argument("--N", type=int, help="grid points (power of two)")
    sp.add_argument("--u0", help="initial data, expression in x")
    sp.add_argument("--monitor-stride", type=int, dest="monitor_stride")
    sp.add_argument("--no-dealias", action="store_const", const=True, dest="no_dealias")
    sp.add_argument("--gamma", type=float, help="third-density weight (default 1.5)")
    add_common(sp)

    sp = sub.add_parser("exact", help="closed-form solution families")
    sp.add_argument("family", choices=["cn4", "degenerate"])
    add_spec(sp)
    sp.add_argument("--c1", type=float)
    sp.add_argument("--c2", type=float)
    sp.add_argument("--a", type=float, help="amplitude scale (cn4) or shift (degenerate)")
    sp.add_argument("--b", type=float)
    sp.add_argument("--d", type=float)
    sp.add_argument("--t0", type=float, help="first snapshot time")
    sp.add_argument("--snapshots", type=int)
    sp.add_argument("--dt", type=float, help="snapshot spacing")
    sp.add_argument("--N", type=int)
    sp.add_argument("--check", action="store_const", const=True,
                    help="evaluate the PDE residual of the field")
    add_common(sp)

    sp = sub.add_parser("verify", help="invariance of a solved field under a generator flow")
    add_spec(sp)
    sp.add_argument("--generator", help="six comma-separated constants c0..c5")
    sp.add_argument("--solution", help="fields CSV produced by solve/exact")
    sp.add_argument("--epsilon", type=float, help="flow parameter (default 0.01)")
    add_common(sp)

    sp = sub.add_parser("transform", help="equivalence transformations")
    sp.add_argument("action", choices=["reduce-to-constant", "gauge", "mobius"])
    add_spec(sp)
    sp.add_argument("--tol", type=float, help="reducibility tolerance (default 1e-6)")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--abcd", help="Mobius tuple a,b,c,d")
    sp.add_argument("--e", help="x/u tuple e0,e1,e2")
    add_common(sp)

    return p


_DISPATCH = {
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "solve": cmd_solve,
    "exact": cmd_exact,
    "verify": cmd_verify,
    "transform": cmd_transform,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads_cap()
        return _DISPATCH[args.command](args)
    except BlowUpError as err:
        emit({"schema": 1, "error": "numerical blow-up", "at": err.t})
        return 3
    except InconclusiveRankError as err:
        emit({"schema": 1, "error": "inconclusive classification",
              "candidates": list(err.candidates), "gap": err.gap})
        return 2
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except RuntimeError as err:
        emit({"schema": 1, "error": "numerical failure", "detail": str(err)})
        return 3


if __name__ == "__main__":
    sys.exit(main())
