"""Command line front end: ``quatmax verify | generate | convergence``.

Exit codes: 0 success, 1 a check failed or a study was inconclusive,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import darboux as Dx
from . import fields as F
from . import maxwellq as Q
from . import media as M
from .convergence import D_error_on_grid, grid_residual, run_study
from .errors import QuatmaxError
from .fields import QuatField
from .grid import Ball, GridSpec, sample
from .verify import DEFAULT_TOLERANCES, SUITES, VerifyConfig, run_suite

log = logging.getLogger("quatmax")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors already; keep that explicit."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_grid(text, exclusion=None) -> GridSpec:
    """``o=-1,-1,-1,h=0.0625,n=33``; ``o`` and ``n`` may be scalars."""
    p = M.parse_params(text)
    missing = {"o", "h", "n"} - set(p)
    if missing:
        raise M.ConfigurationError(f"--grid is missing {', '.join(sorted(missing))}")
    o = p["o"] if isinstance(p["o"], tuple) else (p["o"],) * 3
    n = p["n"] if isinstance(p["n"], tuple) else (p["n"],) * 3
    if any(float(c) != int(c) for c in n):
        raise M.ConfigurationError("--grid n must be integers")
    return GridSpec(tuple(float(c) for c in o), float(p["h"]), tuple(int(c) for c in n), exclusion)


def parse_exclusion(text) -> Ball:
    p = M.parse_params(text)
    if "r" not in p:
        raise M.ConfigurationError("--exclude needs r=<radius>")
    c = p.get("c", (0.0, 0.0, 0.0))
    if not isinstance(c, tuple) or len(c) != 3:
        raise M.ConfigurationError("--exclude c needs three coordinates")
    return Ball(c, float(p["r"]))


def _number(text):
    v = complex(text.replace("i", "j"))
    return v.real if v.imag == 0 else v


def _grid_from_args(args, default):
    excl = parse_exclusion(args.exclude) if args.exclude else None
    if args.grid:
        return parse_grid(args.grid, excl)
    if excl is not None:
        return GridSpec(default.origin, default.h, default.counts, excl)
    return default


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _meta(t0):
    return {
        "started_at": datetime.fromtimestamp(t0, timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - t0, 3),
    }


# -- verify ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    t0 = time.time()
    tols = {}
    for item in args.tol or []:
        key, _, val = item.partition("=")
        if key not in DEFAULT_TOLERANCES:
            raise M.ConfigurationError(f"unknown tolerance {key!r}")
        if not float(val) > 0:
            raise M.ConfigurationError("tolerances must be positive")
        tols[key] = float(val)
    cfg = VerifyConfig(
        seed=args.seed,
        profile=args.profile,
        omega=args.omega,
        c=args.c,
        grid=_grid_from_args(args, None) if (args.grid or args.exclude) else None,
        tolerances=tols,
    )
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(n, cfg) for n in names]
    passed = all(r.passed for r in results)
    report = {
        "command": "verify",
        "suite": args.suite,
        "config": cfg.to_dict(),
        "passed": passed,
        "suites": [r.to_dict() for r in results],
        "meta": {**_meta(t0), "suite_elapsed_s": {r.suite: round(r.elapsed, 3) for r in results}},
    }
    for r in results:
        bad = r.first_failure()
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.suite}: {len(r.checks)} checks in {r.elapsed:.2f}s")
        if bad is not None:
            where = bad.location if bad.location is not None else bad.detail.get("sample_index")
            print(f"    first failure: {bad.name}: observed {bad.observed:.3e} "
                  f"(required {bad.comparison} {bad.tolerance:.1e}) at {where}")
    if args.out:
        _write_json(args.out, report)
    return EXIT_OK if passed else EXIT_FAIL


# -- generate --------------------------------------------------------------------

def _psi_from_spec(text):
    """``planewave:c=1,0,0`` | ``exp:a=0,1,0`` | ``spherical:c=1`` -> SchrodingerSolution."""
    name, _, rest = text.partition(":")
    p = M.parse_params(rest)
    if name == "planewave":
        c = np.asarray(p.get("c", (1.0, 0.0, 0.0)), dtype=complex)
        return Dx.SchrodingerSolution(F.exp(F.linear(1j * c)), F.constant(-(c @ c)))
    if name == "exp":
        a = np.asarray(p.get("a", (1.0, 0.0, 0.0)), dtype=complex)
        return Dx.SchrodingerSolution(F.exp(F.linear(a)), F.constant(a @ a))
    if name == "spherical":
        c = complex(p.get("c", 1.0))
        return Dx.SchrodingerSolution(Dx.fundamental_psi(c), F.constant(-c * c))
    raise M.ConfigurationError(f"unknown psi family {name!r}; use planewave, exp or spherical")


def _generate_fields(args):
    """Return (named fields, residual evaluator, profile label, omega, default grid)."""
    if args.solution == "planewave":
        prof = M.make_profile("vacuum")
        wave = F.exp(-1j * F.coordinate(1))
        E, H = QuatField.vector(0, 0, wave), QuatField.vector(0, -wave, 0)
        src = M.SourceData(omega=1.0)
        t = M.transform(prof, 1.0)
        cE, cH = M.scale_fields(E, H, t)

        def residuals(pts):
            cl = Q.classical_residuals(E, H, prof, src, pts)
            q = Q.quaternionic_residuals(cE, cH, t, src, pts)
            return {**cl.as_dict(), **q.as_dict()}

        return {"E": E, "H": H}, residuals, prof.label(), 1.0, GridSpec.cube(-1, 1, 33)

    prof = M.parse_profile(args.profile or "planewave-phi:c=0,0,1")
    g = Dx.GeneratingFunction.from_phi(prof.phi)
    if args.solution == "darboux":
        psi = _psi_from_spec(args.psi or "planewave:c=1,0,0")
        f = Dx.darboux_transform(g, psi)
        default = GridSpec.cube(-1, 1, 33)
    else:
        c = complex(args.c if args.c is not None else 1.0)
        psi = Dx.SchrodingerSolution(Dx.fundamental_psi(c), F.constant(-c * c))
        f = Dx.darboux_transform(g, psi)
        default = GridSpec.cube(-2, 2, 33, Ball((0, 0, 0), 0.1))

    def residuals(pts):
        return {"dirac": Dx.dirac_residual(f, g.alpha, pts).coeffs}

    return {"f": f}, residuals, prof.label(), 0.0, default


def cmd_generate(args) -> int:
    t0 = time.time()
    fields, residuals, label, omega, default = _generate_fields(args)
    spec = _grid_from_args(args, default)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, fld in fields.items():
        path = out if len(fields) == 1 else out.with_name(f"{out.stem}_{name}{out.suffix or '.csv'}")
        sample(fld, spec).to_csv(path)
        files[name] = str(path)
    report = Q.sweep(residuals, spec, profile=label, omega=omega)
    meta = {
        "command": "generate",
        "solution": args.solution,
        "profile": label,
        "psi": args.psi,
        "c": None if args.c is None else str(args.c),
        "files": files,
        "grid": spec.metadata(),
        "residual_report": report.to_dict(),
        "meta": _meta(t0),
    }
    sidecar = out.with_suffix(".json")
    _write_json(sidecar, meta)
    print(f"wrote {', '.join(files.values())} and {sidecar}; max residual {report.linf():.3e}")
    return EXIT_OK


# -- convergence -----------------------------------------------------------------

def _convergence_residual(op):
    x1 = F.coordinate(1)
    if op == "d-sin":
        return D_error_on_grid(QuatField(F.sin(x1)))
    if op == "d-linear":
        return D_error_on_grid(QuatField(x1, F.coordinate(2), 0, F.coordinate(3)))
    if op == "d-exp":
        return D_error_on_grid(QuatField.vector(F.exp(F.coordinate(2)), F.sin(x1), F.cos(F.coordinate(3))))
    if op == "darboux":
        g = Dx.GeneratingFunction.from_phi(F.exp(1j * F.coordinate(3)))
        f = Dx.darboux_transform(g, Dx.SchrodingerSolution(F.exp(1j * x1), F.constant(-1.0)))
        return grid_residual(lambda s: Dx.dirac_residual_grid(f, g.alpha, s))
    if op == "maxwell":
        prof = M.make_profile("product-exp")
        t = M.transform(prof, 1.0)
        # not a solution in this medium: measure R1 on the grid against its exact value
        wave = F.exp(-1j * x1)
        cE, cH = M.scale_fields(QuatField.vector(0, 0, wave), QuatField.vector(0, -wave, 0), t)
        src = M.SourceData(omega=1.0)

        def make(spec):
            res = Q.quaternionic_residuals_grid(cE, cH, t, src, spec)
            g = res["R1"]
            pts = spec.nodes()[g.valid]
            vals = g.values.copy()
            if pts.size:
                vals[g.valid] -= Q.quaternionic_residuals(cE, cH, t, src, pts).R1.coeffs
            return type(g)(spec, vals, g.valid)

        return grid_residual(make)
    raise M.ConfigurationError(f"unknown convergence op {op!r}")


CONVERGENCE_OPS = ("d-sin", "d-linear", "d-exp", "darboux", "maxwell")


def cmd_convergence(args) -> int:
    t0 = time.time()
    if args.levels < 2:
        raise M.ConfigurationError("--levels must be at least 2")
    if args.grid:
        spec = _grid_from_args(args, None)
    else:
        n = 2.0 / args.h
        if abs(n - round(n)) > 1e-9:
            raise M.ConfigurationError("--h must divide the default box [-1, 1] evenly")
        excl = parse_exclusion(args.exclude) if args.exclude else None
        spec = GridSpec((-1.0,) * 3, args.h, (int(round(n)) + 1,) * 3, excl)
    result = run_study(_convergence_residual(args.op), spec, levels=args.levels)
    print(f"{'h':>12} {'error':>12} {'order':>8}")
    for i, (h, e) in enumerate(zip(result.hs, result.errors)):
        order = f"{result.orders[i - 1]:.3f}" if i and result.orders else ""
        print(f"{h:12.5g} {e:12.4e} {order:>8}")
    print(f"status: {result.status}")
    if args.out:
        _write_json(args.out, {"command": "convergence", "op": args.op, "grid": spec.metadata(),
                               **result.to_dict(), "meta": _meta(t0)})
    return EXIT_OK if result.passed else EXIT_FAIL


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quatmax", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--profile", help="medium, e.g. exp:a=1,0,0 or spherical:c=2")
        p.add_argument("--grid", help="o=<origin>,h=<spacing>,n=<counts>")
        p.add_argument("--exclude", help="c=<center>,r=<radius>")
        p.add_argument("--c", type=_number, help="Helmholtz constant of the fundamental solution")
        p.add_argument("--out", help="output path")

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    common(v)
    v.add_argument("--omega", type=_number, default=1.0, help="frequency, complex allowed (1+0.1i)")
    v.add_argument("--seed", type=int, default=42, help="sampling seed")
    v.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", help="sample an exact solution onto a grid")
    g.add_argument("solution", choices=["darboux", "fundamental", "planewave"])
    common(g)
    g.add_argument("--psi", help="Schrodinger solution: planewave:c=..., exp:a=..., spherical:c=...")
    g.set_defaults(func=cmd_generate, out="field.csv")

    c = sub.add_parser("convergence", help="observed order of the grid operator")
    c.add_argument("op", choices=CONVERGENCE_OPS)
    c.add_argument("--h", type=float, default=0.1, help="coarsest spacing on [-1, 1]^3")
    c.add_argument("--levels", type=int, default=3, help="number of grids, at least 2")
    c.add_argument("--grid", help="coarsest grid, overrides --h")
    c.add_argument("--exclude", help="c=<center>,r=<radius>")
    c.add_argument("--out", help="JSON report path")
    c.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except QuatmaxError as exc:
        print(f"quatmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, (M.ConfigurationError,)) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
