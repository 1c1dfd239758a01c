"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 input parse error,
3 precondition violation, 4 numeric guard.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from .bias import bias_constant, bias_signal, geometric_bias_sum, load_geodesics, trace_rhs_spectral
from .catalog import RelationRefused, SpectrumCatalog, load_catalog, relation_lattice, validate_weyl
from .dihedral import export_progression, reference_characters, solve_hecke
from .distribution import (
    AmplitudeSet,
    density_inversion,
    sample_distribution,
    time_average,
)
from .errors import ConfigError, HolobiasError, PreconditionError
from .kernels import HolonomyTestFunction, KernelScale, SmoothingKernel


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _common(args):
    f = HolonomyTestFunction.parse(args.f)
    kernel = SmoothingKernel(args.kernel)
    scale = KernelScale(args.eta, args.eta0)
    catalog = load_catalog(args.catalog) if args.catalog else SpectrumCatalog()
    T = math.inf if args.T is None else args.T
    if not T > 0:
        raise ConfigError("--T must be positive")
    return f, kernel, scale, catalog, T


def _csv(header: str, cols) -> str:
    rows = [header]
    for vals in zip(*cols):
        rows.append(",".join(repr(float(v)) for v in vals))
    return "\n".join(rows) + "\n"


def _svg(x, y, title: str, width: int = 640, height: int = 400) -> str:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pad = 40
    x0, x1 = float(x.min()), float(x.max())
    y1 = float(y.max()) if y.size and y.max() > 0 else 1.0
    sx = (width - 2 * pad) / (x1 - x0 if x1 > x0 else 1.0)
    sy = (height - 2 * pad) / y1
    pts = " ".join(f"{pad + (a - x0) * sx:.2f},{height - pad - b * sy:.2f}" for a, b in zip(x, y))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<text x="{pad}" y="{pad - 10}" font-family="sans-serif" font-size="14">{title}</text>\n'
        f'<text x="{pad}" y="{height - 10}" font-family="sans-serif" font-size="11">{x0:.4g}</text>\n'
        f'<text x="{width - pad}" y="{height - 10}" font-family="sans-serif" font-size="11" '
        f'text-anchor="end">{x1:.4g}</text>\n'
        f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>\n'
        "</svg>\n"
    )


def _amplitudes(args, f, kernel, scale, catalog, T) -> AmplitudeSet:
    if args.amplitudes:
        try:
            a = [float(v) for v in args.amplitudes.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --amplitudes list: {exc}") from exc
        return AmplitudeSet(a, args.center)
    return AmplitudeSet.from_catalog(catalog, f, kernel, scale, T)


# -- subcommands -------------------------------------------------------------------


def cmd_bias(args):
    f, kernel, scale, catalog, _ = _common(args)
    b = bias_constant(catalog, f, kernel, scale)
    out = {
        "b": b.value,
        "zero_line_contribution": b.zero_line_contribution,
        "trivial_contribution": b.trivial_contribution,
        "c0": b.c0,
        "config": _config(args),
    }
    _write(args.out, _dump(out))


def cmd_signal(args):
    f, kernel, scale, catalog, T = _common(args)
    sig = bias_signal(catalog, f, kernel, scale, T)
    y_min = scale.eta0 if args.y_min is None else args.y_min
    if not args.y_max > y_min:
        raise ConfigError("--y-max must exceed --y-min")
    n = int(math.ceil((args.y_max - y_min) / args.grid_step))
    y = y_min + (args.y_max - y_min) * np.arange(n + 1) / n
    E = sig(y)
    _write(args.out, _csv("y,E", [y, E]))
    if args.svg:
        _write(args.svg, _svg(y, E - min(0.0, float(E.min())), "E(y)"))


def cmd_density(args):
    f, kernel, scale, catalog, T = _common(args)
    amps = _amplitudes(args, f, kernel, scale, catalog, T)
    if amps.positive.size < 3:
        raise PreconditionError(
            f"density inversion needs at least 3 positive amplitudes, got {amps.positive.size}; "
            "use the `sample` subcommand for this amplitude set"
        )
    dist = density_inversion(amps, tail_epsilon=args.tail_epsilon)
    _write(args.out, _csv("x,p", [dist.grid, dist.density]))
    summary = dist.summary()
    summary["symmetry_defect"] = dist.info["symmetry_defect"]
    summary["config"] = _config(args)
    _write(args.summary, _dump(summary))
    if args.svg:
        _write(args.svg, _svg(dist.grid, dist.density, "density"))


def cmd_sample(args):
    if args.seed is None:
        raise ConfigError("sampling needs an explicit --seed")
    f, kernel, scale, catalog, T = _common(args)
    amps = _amplitudes(args, f, kernel, scale, catalog, T)
    lattice = None
    if not args.amplitudes:
        cat = catalog.truncated(T) if math.isfinite(T) else catalog
        try:
            lattice = relation_lattice(cat, share_equal_s=args.share_equal_s)
        except RelationRefused:
            if not args.assume_independent:
                raise
    emp = sample_distribution(amps, lattice, args.samples, args.seed, bins=args.bins,
                              qmc=args.qmc, workers=args.workers)
    _write(args.out, _csv("x,p", [emp.grid, emp.density]))
    summary = emp.summary()
    summary.update({
        "support": list(emp.support),
        "within_support": emp.within_support,
        "symmetry_defect": float(np.max(np.abs(emp.density - emp.density[::-1]))),
        "subtorus_rank": None if lattice is None else lattice.r,
        "config": _config(args),
    })
    _write(args.summary, _dump(summary))
    if args.svg:
        _write(args.svg, _svg(emp.grid, emp.density, "empirical density"))


def cmd_timeavg(args):
    f, kernel, scale, catalog, T = _common(args)
    if args.Y is None:
        raise ConfigError("timeavg needs --Y")
    if not (scale.eta0 < args.Y):
        raise ConfigError("need eta <= eta0 < Y")
    names = args.h or ["identity"]
    values = {h: time_average(catalog, f, kernel, scale, T, h, args.Y, args.grid_step) for h in names}
    _write(args.out, _dump({"time_average": values, "config": _config(args)}))


def cmd_geodesics(args):
    if not args.geodesics:
        raise ConfigError("geodesics needs --geodesics PATH")
    f = HolonomyTestFunction.parse(args.f)
    kernel = SmoothingKernel(args.kernel)
    scale = KernelScale(args.eta, args.eta0)
    recs = load_geodesics(args.geodesics)
    res = geometric_bias_sum(recs, f, kernel, scale, args.y, args.primitive_only, args.weighting)
    out = {"value": res.value, "normalized": res.normalized, "count": res.count,
           "weighting": res.weighting, "config": _config(args)}
    if args.catalog:
        catalog = load_catalog(args.catalog)
        tr = trace_rhs_spectral(catalog, f, kernel, scale, args.y, args.parity)
        out["spectral_main_terms"] = {"value": tr.value, "spectral": tr.spectral,
                                      "zero_lines": tr.zero_lines, "trivial": tr.trivial,
                                      "parity": tr.parity, "dropped_error": tr.dropped_error}
    _write(args.out, _dump(out))


_RANGE = re.compile(r"^n=(-?\d+)\.\.(-?\d+)$")


def cmd_dihedral(args):
    sol = solve_hecke(*reference_characters())
    out = {"solution": sol.to_json(), "config": _config(args)}
    if args.export:
        m = _RANGE.match(args.export.strip())
        if not m:
            raise ConfigError(f"--export must look like n=0..9, got {args.export!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError("empty export range")
        cat = export_progression(sol, range(lo, hi + 1), args.p, args.mult)
        out["catalog"] = cat.to_json()
        out["offsets"] = [str(Fraction(n) + sol.t_offset) for n in range(lo, hi + 1)]
    _write(args.out, _dump(out))


def cmd_validate(args):
    if not args.catalog:
        raise ConfigError("validate needs --catalog PATH")
    catalog = load_catalog(args.catalog)
    report = validate_weyl(catalog, args.volume, args.slack)
    out = {
        "lines": len(catalog.lines),
        "zero_lines": len(catalog.zero_lines),
        "equal_s_groups": catalog.equal_s_groups(),
        "weyl_violations": [vars(v) for v in report],
        "config": _config(args),
    }
    try:
        lat = relation_lattice(catalog)
        out["relations"] = [list(r) for r in lat.relations]
        out["subtorus_rank"] = lat.r
    except RelationRefused as exc:
        out["relations"] = None
        out["relation_note"] = str(exc)
    _write(args.out, _dump(out))


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--catalog", metavar="PATH")
    common.add_argument("--f", default="cos:1", metavar="SPEC",
                        help="cos:k, sin:k, JSON coefficient table or @file")
    common.add_argument("--kernel", default="bump")
    common.add_argument("--eta", type=float, default=0.1)
    common.add_argument("--eta0", type=float, default=None)
    common.add_argument("--T", type=float, default=None)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--svg", metavar="PATH")

    p = _Parser(prog="holobias", description="Holonomy bias computations from spectral data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("bias", parents=[common], help="bias constant and its parts")
    s.set_defaults(func=cmd_bias)

    s = sub.add_parser("signal", parents=[common], help="truncated bias signal on a y-grid")
    s.add_argument("--y-min", type=float, default=None)
    s.add_argument("--y-max", type=float, default=50.0)
    s.add_argument("--grid-step", type=float, default=0.01)
    s.set_defaults(func=cmd_signal)

    for name, helptext in (("density", "density by Bessel-product inversion"),
                           ("sample", "empirical distribution by torus sampling")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--amplitudes", default=None, help="comma-separated amplitudes (skips the catalog)")
        s.add_argument("--center", type=float, default=0.0)
        s.add_argument("--summary", metavar="PATH", default=None)
        if name == "density":
            s.add_argument("--tail-epsilon", type=float, default=1e-8)
            s.set_defaults(func=cmd_density)
        else:
            s.add_argument("--samples", type=int, default=1_000_000)
            s.add_argument("--seed", type=int, default=None)
            s.add_argument("--qmc", action="store_true")
            s.add_argument("--bins", type=int, default=200)
            s.add_argument("--workers", type=int, default=1)
            s.add_argument("--share-equal-s", action="store_true")
            s.add_argument("--assume-independent", action="store_true",
                           help="treat float frequencies as independent when the catalog does not say")
            s.set_defaults(func=cmd_sample)

    s = sub.add_parser("timeavg", parents=[common], help="long-run time averages of h(E(y))")
    s.add_argument("--Y", type=float, default=None)
    s.add_argument("--grid-step", type=float, default=0.01)
    s.add_argument("--h", action="append", help="identity, square, one, indicator>c, clipped-exp")
    s.set_defaults(func=cmd_timeavg)

    s = sub.add_parser("geodesics", parents=[common], help="geometric bias sums from a table")
    s.add_argument("--geodesics", metavar="PATH")
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--weighting", default="plain", choices=["plain", "length-times-f", "weyl-tilde"])
    s.add_argument("--primitive-only", action="store_true")
    s.add_argument("--parity", default="full", choices=["even", "odd", "full"])
    s.set_defaults(func=cmd_geodesics)

    s = sub.add_parser("dihedral", help="Hecke character solution and progression export")
    s.add_argument("--export", default=None, metavar="n=A..B")
    s.add_argument("--p", type=int, default=None, help="weight; defaults to the k1 residue")
    s.add_argument("--mult", type=int, default=1)
    s.add_argument("--out", metavar="PATH")
    s.set_defaults(func=cmd_dihedral)

    s = sub.add_parser("validate", parents=[common], help="catalog checks")
    s.add_argument("--volume", type=float, default=1.0)
    s.add_argument("--slack", type=float, default=1.0)
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except HolobiasError as exc:
        print(f"holobias: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
