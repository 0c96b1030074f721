"""
Command-line front end.

Exit codes: 0 all checks pass, 1 some check fails, 2 some check is
inconclusive (and none fails), 64 usage or configuration error.
"""

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, parse_config
from .constants import bbm_constant, first_coord_moment, moment_by_quadrature, sphere_surface_area
from .directional import EpsGrid, QuadConfig, bbm_mollifier_functional, directional_profile
from .domains import build_domain
from .energies import jump_energy, sobolev_energy, total_variation
from .fields import FieldConfigError, build_field
from .io import dumps_json, format_float, svg_loglog, write_csv, write_json, write_svg
from .tail import (
    InsufficientBudgetError,
    SamplerConfig,
    SGrid,
    ShellUnderflowError,
    tail_measure_exact_grid,
    tail_measure_profile,
)
from .verifier import run_suite

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _unit(dim, i=0):
    e = [0.0] * dim
    e[i] = 1.0
    return e


def _preset_field(name, dim):
    presets = {
        "linear": {"kind": "linear", "slope": _unit(dim)},
        "gaussian": {"kind": "gaussian", "center": [0.0] * dim},
        "constant": {"kind": "constant", "dim": dim, "value": 1.0},
        "step": {"kind": "step", "normal": _unit(dim), "offset": 0.5, "jump": 1.0},
        "cusp": {"kind": "cusp", "center": [0.0] * dim, "exponent": 0.5,
                 "support": {"lo": [-1.0] * dim, "hi": [1.0] * dim}},
        "power-singularity": {"kind": "power-singularity", "center": [0.0] * dim, "exponent": 0.125,
                              "support": {"lo": [-1.0] * dim, "hi": [1.0] * dim}},
    }
    return presets.get(name)


def _preset_domain(name, dim):
    presets = {
        "unit": {"kind": "box", "lo": [0.0] * dim, "hi": [1.0] * dim},
        "sym": {"kind": "box", "lo": [-1.0] * dim, "hi": [1.0] * dim},
        "gauss": {"kind": "box", "lo": [-3.0] * dim, "hi": [3.0] * dim},
        "ball": {"kind": "ball", "center": [0.0] * dim, "radius": 1.0},
    }
    return presets.get(name)


def _load_spec(text, preset, what, dim):
    spec = preset(text, dim)
    if spec is not None:
        return spec
    try:
        spec = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"--{what}: expected a preset name or a JSON object, got {text!r}") from None
    if not isinstance(spec, dict):
        raise UsageError(f"--{what}: JSON spec must be an object")
    return spec


def _field_domain(args):
    fspec = _load_spec(args.field, _preset_field, "field", args.dim)
    dspec = _load_spec(args.domain, _preset_domain, "domain", args.dim)
    try:
        field = build_field(fspec)
    except FieldConfigError as exc:
        raise UsageError(f"--field: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--field: {exc}") from None
    try:
        domain = build_domain(dspec)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"--domain: {exc}") from None
    if field.dim != domain.dim:
        raise UsageError("field and domain dimensions differ")
    return field, domain


def _emit_csv(args, name, header, rows):
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = write_csv(out / name, header, rows)
        print(f"wrote {path}")
    else:
        w = sys.stdout
        w.write(",".join(header) + "\n")
        for row in rows:
            w.write(",".join(format_float(v) for v in row) + "\n")


# subcommands ---------------------------------------------------------------------

def cmd_constants(args):
    print("N,q,I_q(N),K_q_N,surface_area,quadrature_check")
    for N in args.N:
        for q in args.q:
            I = first_coord_moment(q, N).value
            K = bbm_constant(q, N) if q >= 1 else float("nan")
            quad = moment_by_quadrature(q, N, 4096) if N <= 3 else float("nan")
            print(",".join([str(N), format_float(q), format_float(I), format_float(K),
                            format_float(sphere_surface_area(N)), format_float(quad)]))
    return EXIT_OK


def cmd_tail(args):
    field, domain = _field_domain(args)
    r = args.q if args.r is None else args.r
    prof = tail_measure_profile(field, domain, args.q, r, SGrid(args.s_min, args.s_max, args.per_decade),
                                SamplerConfig(args.pairs, args.seed, workers=args.threads))
    _emit_csv(args, "tail.csv", ["s", "mu_hat", "ci_halfwidth", "s_mu"], prof.rows())
    return EXIT_OK


def _quad(args):
    return QuadConfig(spatial=args.spatial, samples=args.spatial_samples,
                      sphere_resolution=args.sphere_resolution, seed=args.seed, workers=args.threads)


def cmd_directional(args):
    field, domain = _field_domain(args)
    r = args.q if args.r is None else args.r
    prof = directional_profile(field, domain, args.q, r, EpsGrid(args.eps_max, args.eps_min, args.per_decade),
                               _quad(args))
    _emit_csv(args, "directional.csv", ["eps", "value", "ci_halfwidth"], prof.rows())
    return EXIT_OK


def cmd_bbm(args):
    field, domain = _field_domain(args)
    sigma = args.eps / 10.0 if args.sigma is None else args.sigma
    est = bbm_mollifier_functional(field, domain, args.q, args.eps, sigma, _quad(args))
    print("eps,sigma,value,ci_halfwidth,K_q_N")
    print(",".join(format_float(v) for v in (args.eps, sigma, est.value, est.ci,
                                              bbm_constant(args.q, domain.dim))))
    return EXIT_OK


def cmd_energy(args):
    field, domain = _field_domain(args)
    quad = _quad(args)
    if args.kind == "sobolev":
        e = sobolev_energy(field, domain, args.q, quad, fd_step=args.fd_step)
    elif args.kind == "total-variation":
        e = total_variation(field, domain, quad)
    else:
        e = jump_energy(field, domain, args.q)
    sys.stdout.write(dumps_json(e.to_dict()))
    return EXIT_OK


def cmd_oracle(args):
    spec = _load_spec(args.field, _preset_field, "field", args.dim)
    if spec.get("kind") != "grid":
        lo = [0.0] * args.dim if args.lo is None else args.lo
        hi = [1.0] * args.dim if args.hi is None else args.hi
        spec = {"kind": "grid", "sample": {"field": spec, "lo": lo, "hi": hi, "n": args.nodes}}
    try:
        field = build_field(spec)
    except (FieldConfigError, ValueError) as exc:
        raise UsageError(f"--field: {exc}") from None
    r = args.q if args.r is None else args.r
    prof = tail_measure_exact_grid(field, args.q, r, SGrid(args.s_min, args.s_max, args.per_decade))
    _emit_csv(args, "oracle.csv", ["s", "mu_hat", "ci_halfwidth", "s_mu"], prof.rows())
    return EXIT_OK


def _slug(name):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "check"


def cmd_verify(args):
    cfg, checks = parse_config(args.config)
    if args.seed is not None:
        checks = [replace(c, seed=args.seed) for c in checks]
    checks = [replace(c, workers=args.threads) for c in checks]
    seed = cfg.seed if args.seed is None else args.seed
    meta = {"version": cfg.version, "seed": seed, "config": Path(args.config).name,
            "budgets": cfg.budgets.model_dump(exclude_none=True), "package_version": __version__}
    report = run_suite(checks, meta)
    out = Path(args.out_dir or cfg.out_dir or "weakgrad-out")
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "report.json", report.to_dict())
    write_json(out / "timing.json", {"runtime_s": report.runtime_s})
    used = set()
    for i, rec in enumerate(report.checks):
        base = _slug(rec.name)
        if base in used:
            base = f"{base}-{i}"
        used.add(base)
        for label, prof in rec.profiles.items():
            if hasattr(prof, "s_mu"):
                write_csv(out / f"{base}__{label}.csv", ["s", "mu_hat", "ci_halfwidth", "s_mu"], prof.rows())
                svg = svg_loglog([("s mu(s)", prof.s_grid, prof.s_mu)], rec.name, "s", "s mu(s)",
                                 reference=rec.bounds.get("target") if isinstance(rec.bounds.get("target"), float) else None)
            else:
                write_csv(out / f"{base}__{label}.csv", ["eps", "value", "ci_halfwidth"], prof.rows())
                svg = svg_loglog([("D(eps)", prof.eps_grid, prof.values)], rec.name, "eps", "D(eps)")
            write_svg(out / f"{base}__{label}.svg", svg)
        print(f"{rec.verdict.upper():13s} {rec.name}  "
              + "  ".join(f"{k}: {v:+.3f}" for k, v in rec.margins.items()))
    n = report.counts
    print(f"{n['pass']} pass, {n['fail']} fail, {n['inconclusive']} inconclusive; report in {out}")
    return report.exit_code


# parser --------------------------------------------------------------------------

def _common(p, field=True):
    p.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
    p.add_argument("--out-dir", default=None, help="write CSV output here instead of stdout")
    if field:
        p.add_argument("--field", required=True, help="preset name or JSON field spec")
        p.add_argument("--domain", default="unit", help="preset (unit, sym, gauss, ball) or JSON domain spec")
        p.add_argument("--dim", type=int, default=1, help="dimension used by presets")
        p.add_argument("--q", type=float, default=2.0)
        p.add_argument("--r", type=float, default=None, help="defaults to q")


def _quad_opts(p):
    p.add_argument("--spatial", choices=["auto", "gauss", "mc"], default="auto")
    p.add_argument("--spatial-samples", type=int, default=200_000)
    p.add_argument("--sphere-resolution", type=int, default=256)


def build_parser():
    p = _Parser(prog="weakgrad", description="Weak-type difference-quotient functionals and limit checks.")
    p.add_argument("--version", action="version", version=f"weakgrad {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("constants", help="sphere moments I_q(N) and K_{q,N}")
    c.add_argument("--N", type=int, nargs="+", default=[1, 2, 3])
    c.add_argument("--q", type=float, nargs="+", default=[1.0, 2.0])
    c.set_defaults(func=cmd_constants)

    t = sub.add_parser("tail", help="Monte Carlo tail profile as CSV")
    _common(t)
    t.add_argument("--s-min", type=float, default=10.0)
    t.add_argument("--s-max", type=float, default=1e4)
    t.add_argument("--per-decade", type=int, default=4)
    t.add_argument("--pairs", type=int, default=1_000_000)
    t.set_defaults(func=cmd_tail)

    d = sub.add_parser("directional", help="directional functional profile as CSV")
    _common(d)
    _quad_opts(d)
    d.add_argument("--eps-max", type=float, default=0.1)
    d.add_argument("--eps-min", type=float, default=1e-3)
    d.add_argument("--per-decade", type=int, default=4)
    d.set_defaults(func=cmd_directional)

    b = sub.add_parser("bbm", help="annulus-mollifier functional at one eps")
    _common(b)
    _quad_opts(b)
    b.add_argument("--eps", type=float, default=0.01)
    b.add_argument("--sigma", type=float, default=None, help="defaults to eps / 10")
    b.set_defaults(func=cmd_bbm)

    e = sub.add_parser("energy", help="Sobolev energy, total variation or jump energy (JSON)")
    _common(e)
    _quad_opts(e)
    e.add_argument("--kind", choices=["sobolev", "total-variation", "jump"], default="sobolev")
    e.add_argument("--fd-step", type=float, default=None)
    e.set_defaults(func=cmd_energy)

    o = sub.add_parser("oracle", help="exact-grid tail measure as CSV")
    _common(o)
    o.add_argument("--nodes", type=int, default=512, help="nodes per axis when sampling a preset")
    o.add_argument("--lo", type=float, nargs="+", default=None)
    o.add_argument("--hi", type=float, nargs="+", default=None)
    o.add_argument("--s-min", type=float, default=1.0)
    o.add_argument("--s-max", type=float, default=1e3)
    o.add_argument("--per-decade", type=int, default=4)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run a check suite; writes report.json, CSV and SVG")
    v.add_argument("config")
    v.add_argument("--seed", type=int, default=None, help="override the config seed")
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out-dir", default=None)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_help(sys.stderr)
            return EXIT_CONFIG
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for line in exc.errors:
            print(f"  {line}", file=sys.stderr)
        return EXIT_CONFIG
    except (InsufficientBudgetError, ShellUnderflowError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
