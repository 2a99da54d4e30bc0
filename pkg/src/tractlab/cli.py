"""Command-line surface: reproducible experiments with deterministic outputs.

Spec mini-language (--spec):
    exp:LAM            lam * e^z
    sin:A:B            sin(A z + B)
    ml:ALPHA           E_alpha(z)
    mlpow:ALPHA:N      E_alpha(z^N)
    smlpow:LAM:ALPHA:N lam * E_alpha(z^N)
    erdos:P:Q:C        int_0^z P(t) e^{Q(t)} dt + C, coeffs comma-separated,
                       ascending order
Complex literals use a+bi form (1, -2.5, 1+2i, 0.5i, i).

Exit codes: 0 = PASS, 2 = a verification check reported FAIL, 1 = usage or
runtime error.  TRACTLAB_OUT overrides the output directory.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import (
    DomainError,
    ErdosIntegral,
    ExpFamily,
    MittagLeffler,
    MittagLefflerPower,
    ParameterError,
    ScaledMittagLefflerPower,
    SineFamily,
    default_threshold,
    evaluate,
    max_modulus,
    order_estimate,
    sector_bound_check,
)
from . import logvar, measure, reports, schroeder, tracts

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>(?:[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)?i)?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' literals: 1, -2.5, 1+2i, -i, 0.5i, 1e3+2e-2i."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty complex literal")
    m = _COMPLEX_RE.match(t)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"bad complex literal {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_part = 0.0
    if m.group("im"):
        imtext = m.group("im")[:-1]  # strip the trailing i
        if imtext in ("", "+"):
            im_part = 1.0
        elif imtext == "-":
            im_part = -1.0
        else:
            im_part = float(imtext)
    return complex(re_part, im_part)


def parse_spec(text: str):
    """Parse the flat spec mini-language into a FunctionSpec."""
    parts = text.strip().split(":")
    tag = parts[0].lower()
    try:
        if tag == "exp":
            return ExpFamily(lam=parse_complex(parts[1]) if len(parts) > 1 else 1.0)
        if tag == "sin":
            a = parse_complex(parts[1]) if len(parts) > 1 else 1.0
            b = parse_complex(parts[2]) if len(parts) > 2 else 0.0
            return SineFamily(alpha=a, beta=b)
        if tag == "ml":
            return MittagLeffler(alpha=float(parts[1]))
        if tag == "mlpow":
            return MittagLefflerPower(alpha=float(parts[1]), n=int(parts[2]))
        if tag == "smlpow":
            return ScaledMittagLefflerPower(lam=float(parts[1]), alpha=float(parts[2]), n=int(parts[3]))
        if tag == "erdos":
            p = tuple(parse_complex(c) for c in parts[1].split(","))
            q = tuple(parse_complex(c) for c in parts[2].split(","))
            c = parse_complex(parts[3]) if len(parts) > 3 else 0.0
            return ErdosIntegral(p_coeffs=p, q_coeffs=q, c=c)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown spec family {tag!r}")


def _outdir(args) -> Path:
    d = Path(os.environ.get("TRACTLAB_OUT", args.out))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _annulus(text: str):
    lo, hi = text.split(":")
    return float(lo), float(hi)


def _config(args, **extra) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# subcommands (each returns an exit code)


def cmd_eval(args) -> int:
    spec = parse_spec(args.spec)
    z = parse_complex(args.z)
    v = evaluate(spec, z)
    payload = {
        "z": z,
        "value": v.value,
        "log_modulus": v.log_modulus,
        "overflow": v.overflow,
    }
    reports.write_json(_outdir(args) / "eval.json", payload, _config(args))
    if v.overflow:
        print(f"f({z}) overflows: log|f| = {v.log_modulus}")
    else:
        print(f"f({z}) = {v.value}")
    return 0


def cmd_maxmod(args) -> int:
    spec = parse_spec(args.spec)
    radii = np.geomspace(args.rmin, args.rmax, args.npoints)
    values = np.array([max_modulus(spec, float(r), args.samples) for r in radii])
    profile = tracts.RadialProfile(radii=radii, values=values, kind="loglogM")
    out = _outdir(args)
    reports.write_profile_csv(out / "maxmod.csv", profile)
    reports.write_json(out / "maxmod.json", {"radii": radii, "loglogM": values}, _config(args))
    print(f"log log M over [{args.rmin}, {args.rmax}]: {values[0]:.4f} .. {values[-1]:.4f}")
    return 0


def cmd_order(args) -> int:
    spec = parse_spec(args.spec)
    rho = order_estimate(spec, args.rmin, args.rmax, args.npoints, args.samples)
    reports.write_json(_outdir(args) / "order.json", {"order": rho}, _config(args))
    print(f"order estimate: {rho:.4f}")
    return 0


def _decompose_from_args(args, spec):
    r_min, r_max = _annulus(args.annulus)
    R = args.R if args.R is not None else default_threshold(spec)
    return tracts.decompose(
        spec, R, r_min, r_max, n_r=args.nr, n_theta=args.ntheta, jobs=args.jobs
    ), R


def cmd_tracts(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    payload = {
        "R": R,
        "n_components": dec.n_components,
        "n_islands": dec.n_islands,
        "touched_boundary": dec.touched_boundary,
    }
    reports.write_json(_outdir(args) / "tracts.json", payload, _config(args, R=R))
    print(f"n_components = {dec.n_components} (islands: {dec.n_islands}) at R = {R}")
    return 0


def cmd_theta(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    out = _outdir(args)
    for comp in dec.component_ids:
        prof = (tracts.theta_star_profile if args.star else tracts.theta_profile)(dec, comp)
        reports.write_profile_csv(out / f"theta_{comp}.csv", prof)
    print(f"wrote theta profiles for {dec.n_components} components")
    return 0


def cmd_psi(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    out = _outdir(args)
    for comp in dec.component_ids:
        prof = tracts.psi_profile(dec, args.beta, comp)
        reports.write_profile_csv(out / f"psi_{comp}.csv", prof)
    print(f"wrote psi profiles for {dec.n_components} components")
    return 0


def cmd_tsuji(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    r_grid = np.geomspace(args.rlo, args.rhi, args.npoints)
    worst = None
    results = {}
    for comp in dec.component_ids:
        rep = tracts.verify_theorem2(
            spec, dec, args.beta, args.r0, args.kappa, r_grid,
            component=comp, c_budget=args.budget, samples=args.samples,
        )
        results[f"component_{comp}"] = {
            "min_residual": rep.min_residual,
            "ratio_at_top": rep.ratio_at_top,
            "excluded_rings": rep.excluded_rings,
            "passed": rep.passed,
        }
        if worst is None or rep.min_residual < worst:
            worst = rep.min_residual
    passed = all(v["passed"] for v in results.values())
    reports.write_json(_outdir(args) / "tsuji.json", results, _config(args, R=R))
    print(f"integral lower-bound residuals: min = {worst:.4f} -> {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 2


def cmd_dca(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    r_grid = np.geomspace(args.rlo, args.rhi, args.npoints)
    rep = tracts.verify_dca(spec, dec, r_grid, samples=args.samples)
    payload = {
        "n_components": dec.n_components,
        "min_residual": rep.min_residual,
        "max_residual": rep.max_residual,
        "bounded_below": rep.bounded_below,
    }
    reports.write_json(_outdir(args) / "dca.json", payload, _config(args, R=R))
    print(
        f"residual loglogM - (N/2)log r in [{rep.min_residual:.4f}, {rep.max_residual:.4f}], "
        f"bounded below: {rep.bounded_below}"
    )
    return 0 if rep.bounded_below else 2


def cmd_hypothesis(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    sol = schroeder.solve_fixed_point(args.beta_schroeder)
    r_grid = np.geomspace(args.rlo, args.rhi, args.npoints)
    rep = tracts.theorem1_hypothesis(spec, dec, sol, r_grid, samples=args.samples)
    payload = {
        "n_components": dec.n_components,
        "min_margin": rep.min_residual,
        "passed": rep.passed,
    }
    reports.write_json(_outdir(args) / "hypothesis.json", payload, _config(args, R=R))
    print(f"slow-growth hypothesis: min margin = {rep.min_residual:.4f} -> "
          f"{'PASS' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 2


def cmd_schroeder(args) -> int:
    sol = schroeder.solve_fixed_point(args.beta_schroeder)
    xs = np.geomspace(sol.xi + 0.01, args.xmax, args.npoints)
    rows = []
    worst = 0.0
    for x in xs:
        p = sol.phi(float(x))
        lhs = sol.phi_log(sol.beta * float(x))
        resid = abs(lhs - sol.mu * p) / (1.0 + sol.mu * p)
        worst = max(worst, resid)
        rows.append({"x": float(x), "phi": p, "epsilon": 1.0 / p if p > 0 else math.inf})
    payload = {
        "beta": sol.beta,
        "xi": sol.xi,
        "mu": sol.mu,
        "fixed_point_residual": abs(math.exp(sol.beta * sol.xi) - sol.xi),
        "worst_functional_equation_residual": worst,
        "table": rows,
    }
    reports.write_json(_outdir(args) / "schroeder.json", payload, _config(args))
    print(f"xi = {sol.xi:.6f}, mu = {sol.mu:.6f}, worst func-eq residual = {worst:.3e}")
    return 0 if worst <= 1e-8 else 2


def cmd_mprofile(args) -> int:
    spec = parse_spec(args.spec)
    dec, R = _decompose_from_args(args, spec)
    prof = tracts.m_profile(dec, args.beta)
    conv = tracts.convexity_check(prof, tol=args.tol)
    out = _outdir(args)
    reports.write_profile_csv(out / "mprofile.csv", prof)
    payload = {
        "min_second_difference": conv.min_second_difference,
        "convex": conv.passed,
        "m_over_r_first": float(prof.values[0] / prof.radii[0]),
        "m_over_r_last": float(prof.values[-1] / prof.radii[-1]),
    }
    reports.write_json(out / "mprofile.json", payload, _config(args, R=R))
    print(f"convexity in log r: {'PASS' if conv.passed else 'FAIL'}")
    return 0 if conv.passed else 2


def cmd_logvar(args) -> int:
    spec = parse_spec(args.spec)
    R = args.R if args.R is not None else default_threshold(spec)
    z = parse_complex(args.z)
    record = logvar.iterate_T(spec, R, args.beta, z, args.nmax)
    out = _outdir(args)
    reports.write_orbit_csv(out / "orbit.csv", record)
    samples = logvar.sample_tract_points(
        spec, R, args.samples, x_range=(args.xlo, args.xhi), seed=args.seed
    )
    rep = logvar.check_expansion(spec, R, samples)
    payload = {
        "orbit_length": len(record.states),
        "exit_index": record.exit_index,
        "escape_certified": record.escape_flag,
        "expansion_checked": rep.checked,
        "expansion_violations": rep.violations,
    }
    reports.write_json(out / "logvar.json", payload, _config(args, R=R))
    print(
        f"orbit: {len(record.states)} states, escape={record.escape_flag}; "
        f"expansion violations: {rep.violations}/{rep.checked}"
    )
    return 0 if rep.passed else 2


def cmd_escape(args) -> int:
    spec = parse_spec(args.spec)
    region = measure.SquareRegion(center=parse_complex(args.center), side=args.side)
    if args.mode == "logcoord":
        R = args.R if args.R is not None else default_threshold(spec)
        rep = measure.tn_density(
            spec, R, args.beta, region, resolution=args.resolution, n_max=args.nmax
        )
    else:
        rep = measure.z_plane_escape_density(
            spec, region, resolution=args.resolution, n_max=args.nmax,
            escape_radius=args.radius,
        )
    out = _outdir(args)
    reports.write_pgm(out / "escape.pgm", rep)
    reports.write_ppm(out / "escape.ppm", rep)
    payload = {
        "kind": rep.kind,
        "density_sequence": rep.density_sequence,
        "relative_density": rep.relative_density,
    }
    reports.write_json(out / "escape.json", payload, _config(args))
    print(f"density sequence: {np.array2string(rep.density_sequence, precision=4)}")
    return 0


def cmd_refine(args) -> int:
    spec = parse_spec(args.spec)
    region = measure.SquareRegion(center=parse_complex(args.center), side=args.side)
    reps = []
    for resolution in args.resolutions:
        if args.mode == "logcoord":
            R = args.R if args.R is not None else default_threshold(spec)
            reps.append(
                measure.tn_density(spec, R, args.beta, region, resolution=resolution, n_max=args.nmax)
            )
        else:
            reps.append(
                measure.z_plane_escape_density(
                    spec, region, resolution=resolution, n_max=args.nmax, escape_radius=args.radius
                )
            )
    study = measure.refinement_study(reps, tolerance=args.tolerance)
    payload = {
        "resolutions": study.resolutions,
        "tail_densities": study.tail_densities,
        "relative_changes": study.relative_changes,
        "stabilized": study.stabilized,
        "shrinking_in_n": study.shrinking_in_n,
    }
    reports.write_json(_outdir(args) / "refine.json", payload, _config(args))
    print(
        f"tails {study.tail_densities} changes {study.relative_changes} "
        f"stabilized={study.stabilized}"
    )
    return 0 if study.stabilized else 2


def cmd_sector(args) -> int:
    rep = sector_bound_check(args.alpha, args.rmax, bound=args.bound)
    payload = {
        "max_modulus": rep.max_modulus,
        "argmax": rep.argmax,
        "passed": rep.passed,
        "growth_trend": rep.growth_trend,
    }
    reports.write_json(_outdir(args) / "sector.json", payload, _config(args))
    print(f"sector max |E_a| = {rep.max_modulus:.4f} -> {'PASS' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 2


# ---------------------------------------------------------------------------


def _add_common(p, spec=True):
    if spec:
        p.add_argument("--spec", required=True, help="function spec, e.g. sin:1:0")
    p.add_argument("--out", default="out", help="output directory (TRACTLAB_OUT overrides)")
    p.add_argument("--jobs", type=int, default=os.cpu_count(), help="grid fill parallelism")
    p.add_argument("--seed", type=int, default=0)


def _add_grid(p):
    p.add_argument("--annulus", default="5:100", help="r_min:r_max")
    p.add_argument("--R", type=float, default=None, help="super-level threshold")
    p.add_argument("--nr", type=int, default=256)
    p.add_argument("--ntheta", type=int, default=1024)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tractlab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"tractlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="point evaluation")
    _add_common(p)
    p.add_argument("--z", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maxmod", help="log log M profile")
    _add_common(p)
    p.add_argument("--rmin", type=float, default=10.0)
    p.add_argument("--rmax", type=float, default=1e4)
    p.add_argument("--npoints", type=int, default=24)
    p.add_argument("--samples", type=int, default=256)
    p.set_defaults(func=cmd_maxmod)

    p = sub.add_parser("order", help="growth order estimate")
    _add_common(p)
    p.add_argument("--rmin", type=float, default=10.0)
    p.add_argument("--rmax", type=float, default=1e4)
    p.add_argument("--npoints", type=int, default=12)
    p.add_argument("--samples", type=int, default=128)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("tracts", help="tract decomposition summary")
    _add_common(p)
    _add_grid(p)
    p.set_defaults(func=cmd_tracts)

    p = sub.add_parser("theta", help="angular occupation profiles")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--star", action="store_true", help="infinite sentinel variant")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("psi", help="angular occupation of the fast-growth set")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--beta", type=float, default=0.25)
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("tsuji", help="integral lower bound vs log log M")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--r0", type=float, default=10.0)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--rlo", type=float, default=100.0)
    p.add_argument("--rhi", type=float, default=1e4)
    p.add_argument("--npoints", type=int, default=16)
    p.add_argument("--budget", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=128)
    p.set_defaults(func=cmd_tsuji)

    p = sub.add_parser("dca", help="component-count growth residual")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--rlo", type=float, default=10.0)
    p.add_argument("--rhi", type=float, default=1e4)
    p.add_argument("--npoints", type=int, default=16)
    p.add_argument("--samples", type=int, default=128)
    p.set_defaults(func=cmd_dca)

    p = sub.add_parser("hypothesis", help="slow-growth hypothesis check")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--beta-schroeder", type=float, default=0.2)
    p.add_argument("--rlo", type=float, default=100.0)
    p.add_argument("--rhi", type=float, default=1e6)
    p.add_argument("--npoints", type=int, default=16)
    p.add_argument("--samples", type=int, default=128)
    p.set_defaults(func=cmd_hypothesis)

    p = sub.add_parser("schroeder", help="fixed point, linearizer and decay tables")
    _add_common(p, spec=False)
    p.add_argument("--beta-schroeder", "--beta", dest="beta_schroeder", type=float, default=0.2)
    p.add_argument("--xmax", type=float, default=1e8)
    p.add_argument("--npoints", type=int, default=50)
    p.set_defaults(func=cmd_schroeder)

    p = sub.add_parser("mprofile", help="quadratic-mean profile and convexity")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_mprofile)

    p = sub.add_parser("logvar", help="orbit dump and expansion check")
    _add_common(p)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--z", default="5")
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--xlo", type=float, default=1.5)
    p.add_argument("--xhi", type=float, default=4.0)
    p.set_defaults(func=cmd_logvar)

    p = sub.add_parser("escape", help="escape density grids and rasters")
    _add_common(p)
    p.add_argument("--mode", choices=("zplane", "logcoord"), default="zplane")
    p.add_argument("--center", default="3.14+3.14i")
    p.add_argument("--side", type=float, default=6.28)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--radius", type=float, default=50.0)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.2)
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("refine", help="resolution-doubling stability study")
    _add_common(p)
    p.add_argument("--mode", choices=("zplane", "logcoord"), default="zplane")
    p.add_argument("--center", default="3.14+3.14i")
    p.add_argument("--side", type=float, default=6.28)
    p.add_argument("--resolutions", type=int, nargs="+", default=[256, 512])
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--radius", type=float, default=50.0)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--tolerance", type=float, default=0.25)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("sector", help="boundedness over the decay sector")
    _add_common(p, spec=False)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rmax", type=float, default=1e3)
    p.add_argument("--bound", type=float, default=10.0)
    p.set_defaults(func=cmd_sector)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract here is exit 1
        if exc.code not in (0, None):
            return 1
        return 0
    try:
        return args.func(args)
    except (ParameterError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
