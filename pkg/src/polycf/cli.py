"""Command-line surface: CF tables, constraint validation, intensities and
size-dispersion smearing, as CSV with '#' comment headers.

Exit status: 0 success (all constraints pass for ``validate``), 1 validation
failure, 2 usage error.  Identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cf_calculus import DEFAULT_TOLERANCES, cf_derivative, validate_constraints
from .cf_core import PiecewiseCF, cf_for
from .geometry import (
    RG2_MC_SAMPLES,
    RG2_MC_SEED,
    SolidKind,
    scale_to_unit_dmax,
    solid_metrics,
)
from .mc_oracle import estimate_rg2, tabulate_cf
from .scattering import (
    PointMixture,
    intensity_curve,
    normalize_curve,
    parse_distribution,
    polydisperse_curve,
    porod_curve,
)

MC_ONLY_KINDS = (SolidKind.CUBE, SolidKind.CYLINDER)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_rows(out_path, header_lines, columns, rows):
    lines = [f"# {h}" for h in header_lines]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _header(args, extra=()):
    return [f"command: {args.invocation}", f"version: {__version__}", *extra]


def _solid_for(name: str, parser):
    try:
        kind = SolidKind(name)
    except ValueError:
        parser.error(f"unknown solid {name!r}")
    return solid_metrics(kind, 1.0)


def _grid(args, parser):
    if args.n < 2:
        parser.error("grid count must be at least 2")
    if not args.min < args.max:
        parser.error("grid min must be below max")
    if args.log:
        if args.min <= 0:
            parser.error("log grid requires a positive minimum")
        return np.geomspace(args.min, args.max, args.n)
    return np.linspace(args.min, args.max, args.n)


def _maybe_plot(args, out_path, render):
    if not getattr(args, "plot", False):
        return
    if out_path is None:
        raise SystemExit("--plot requires --out")
    render(str(Path(out_path).with_suffix(".png")))


# ---------------------------------------------------------------------------
# subcommands


def cmd_cf(args, parser) -> int:
    solid = _solid_for(args.solid, parser)
    if solid.kind in MC_ONLY_KINDS and not args.mc:
        parser.error(f"{args.solid} has no analytic CF; pass --mc")
    if args.normalize_dmax:
        solid = scale_to_unit_dmax(solid)
    rmax = args.rmax if args.rmax is not None else solid.dmax
    r = np.linspace(0.0, rmax, args.n)
    extra = []
    if args.mc:
        if args.seed is None:
            parser.error("--mc requires --seed")
        table = tabulate_cf(solid, np.minimum(r, solid.dmax), args.samples, args.seed)
        columns = ["r", "gamma", "stderr"]
        rows = [(ri, p.value, p.stderr) for ri, p in zip(r, table)]
        extra = [f"seed: {args.seed}", f"samples: {args.samples}"]
    else:
        cf = cf_for(solid)
        gamma = cf(r)
        columns = ["r", "gamma"]
        cols = [r, gamma]
        if args.derivatives:
            inner = np.clip(r, 1e-6 * solid.dmax, solid.dmax * (1 - 1e-6))
            cols.append([cf_derivative(cf, x, 1) for x in inner])
            cols.append([cf_derivative(cf, x, 2) for x in inner])
            columns += ["dgamma", "d2gamma"]
        rows = list(zip(*cols))
    _write_rows(args.out, _header(args, extra), columns, rows)
    _maybe_plot(
        args,
        args.out,
        lambda p: _plot_table(p, rows, columns, "r", "gamma(r)"),
    )
    return 0


def _plot_table(path, rows, columns, xlabel, ylabel, logy=False):
    from .plotting import render_curves

    arr = np.array(rows, dtype=float)
    series = {name: arr[:, i] for i, name in enumerate(columns[1:], start=1)}
    render_curves(path, arr[:, 0], series, xlabel, ylabel, logy=logy)


def cmd_validate(args, parser) -> int:
    if args.solid not in ("tetrahedron", "octahedron"):
        parser.error("validate supports tetrahedron and octahedron")
    solid = _solid_for(args.solid, parser)
    seed = args.seed if args.seed is not None else RG2_MC_SEED
    samples = args.samples if args.samples is not None else RG2_MC_SAMPLES
    if seed != solid.rg2_seed or samples != solid.rg2_samples:
        import dataclasses

        est = estimate_rg2(solid, n=samples, seed=seed)
        solid = dataclasses.replace(
            solid,
            rg2=est.mean,
            rg2_stderr=est.stderr,
            rg2_samples=samples,
            rg2_seed=seed,
        )
    overrides = {
        name: val
        for name, val in [
            ("gamma_at_0", args.tol_gamma0),
            ("slope_at_0", args.tol_slope0),
            ("gamma_at_dmax", args.tol_gamma_dmax),
            ("slope_at_dmax", args.tol_slope_dmax),
            ("volume_moment", args.tol_volume),
            ("gyration_moment", args.tol_gyration),
        ]
        if val is not None
    }
    report = validate_constraints(solid, overrides)
    lines = [
        f"# {h}"
        for h in _header(args, [f"rg2-seed: {seed}", f"rg2-samples: {samples}"])
    ]
    for rec in report.records:
        status = "PASS" if rec.passed else "FAIL"
        lines.append(
            f"{rec.name} {_fmt(rec.expected)} {_fmt(rec.actual)} "
            f"{_fmt(rec.abs_error)} {_fmt(rec.tolerance)} {status}"
        )
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0 if report.all_pass else 1


def _cf_evaluator(solid, args, parser):
    if solid.kind in MC_ONLY_KINDS:
        if not args.mc:
            parser.error(f"{solid.kind.value} has no analytic CF; pass --mc")
        if args.seed is None:
            parser.error("--mc requires --seed")
        return cf_for(solid, mc_samples=args.samples, mc_seed=args.seed)
    return cf_for(solid)


def cmd_intensity(args, parser) -> int:
    q = _grid(args, parser)
    columns = ["q"]
    cols = [q]
    for name in args.solid:
        solid = _solid_for(name, parser)
        if args.normalize_dmax:
            solid = scale_to_unit_dmax(solid)
        curve = intensity_curve(_cf_evaluator(solid, args, parser), q)
        if args.porod:
            cols.append(porod_curve(curve).values)
            columns.append(f"q4I_{name}")
        if args.scale_q0:
            curve = normalize_curve(curve)
        cols.append(curve.values)
        columns.append(f"I_{name}")
    # keep intensity columns first, porod columns after, per solid order
    order = [0] + [i for i, c in enumerate(columns) if c.startswith("I_")] + [
        i for i, c in enumerate(columns) if c.startswith("q4I_")
    ]
    columns = [columns[i] for i in order]
    cols = [cols[i] for i in order]
    rows = list(zip(*cols))
    _write_rows(args.out, _header(args), columns, rows)
    _maybe_plot(
        args,
        args.out,
        lambda p: _plot_table(p, rows, columns, "q", "I(q)", logy=not args.porod),
    )
    return 0


def cmd_polydisperse(args, parser) -> int:
    solid = _solid_for(args.solid, parser)
    if solid.kind in MC_ONLY_KINDS:
        parser.error("polydisperse smearing requires an analytic CF")
    try:
        dist = parse_distribution(args.dist)
    except ValueError as exc:
        parser.error(str(exc))
    if args.normalize_dmax:
        solid = scale_to_unit_dmax(solid)
    cf = cf_for(solid)
    q = _grid(args, parser)
    curve = polydisperse_curve(cf, dist, q)
    columns = ["q", "I_poly"]
    cols = [q, curve.values]
    if args.scale_q0:
        cols.append(normalize_curve(curve).values)
        columns.append("I_poly_scaled")
    rows = list(zip(*cols))
    _write_rows(args.out, _header(args), columns, rows)
    if args.emit_density:
        if isinstance(dist, PointMixture):
            parser.error("--emit-density needs a continuous distribution")
        d = np.linspace(0.0, dist.truncation(1e-12), args.density_points)
        _write_rows(
            args.emit_density, _header(args), ["d", "p"], list(zip(d, dist.pdf(d)))
        )
    _maybe_plot(
        args,
        args.out,
        lambda p: _plot_table(p, rows, columns, "q", "<I>(q)", logy=True),
    )
    return 0


def cmd_compare(args, parser) -> int:
    """Fixed five-solid comparison at unit maximal chord (two CSV files)."""
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = ["tetrahedron", "octahedron", "cube", "cylinder", "sphere"]
    r = np.linspace(0.0, 1.0, args.n)
    q = np.linspace(0.0, args.qmax, args.n)
    cf_cols, i_cols = [r], [q]
    for name in names:
        solid = scale_to_unit_dmax(_solid_for(name, parser))
        if solid.kind in MC_ONLY_KINDS:
            cf = cf_for(solid, mc_samples=args.samples, mc_seed=args.seed)
        else:
            cf = cf_for(solid)
        cf_cols.append(cf(r))
        i_cols.append(normalize_curve(intensity_curve(cf, q)).values)
    extra = [f"seed: {args.seed}", f"samples: {args.samples}"]
    cf_path = outdir / "cf_compare.csv"
    i_path = outdir / "intensity_compare.csv"
    cf_columns = ["r"] + [f"gamma_{n}" for n in names]
    i_columns = ["q"] + [f"I_{n}" for n in names]
    cf_rows = list(zip(*cf_cols))
    i_rows = list(zip(*i_cols))
    _write_rows(cf_path, _header(args, extra), cf_columns, cf_rows)
    _write_rows(i_path, _header(args, extra), i_columns, i_rows)
    if args.plot:
        _plot_table(str(cf_path.with_suffix(".png")), cf_rows, cf_columns, "r", "gamma(r)")
        _plot_table(str(i_path.with_suffix(".png")), i_rows, i_columns, "q", "I(q)/I(0)", logy=True)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_grid_args(p, prefix, default_max, count=200):
    p.add_argument("--min", dest="min", type=float, default=0.0, help=f"{prefix} grid minimum")
    p.add_argument("--max", dest="max", type=float, default=default_max, help=f"{prefix} grid maximum")
    p.add_argument("--n", type=int, default=count, help="grid point count")
    p.add_argument("--log", action="store_true", help="log-spaced grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polycf",
        description="Exact tetrahedron/octahedron correlation functions and "
        "small-angle scattering curves",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="tabulate a correlation function")
    p.add_argument("--solid", required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--derivatives", action="store_true")
    p.add_argument("--normalize-dmax", action="store_true")
    p.add_argument("--mc", action="store_true", help="Monte-Carlo tabulation")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("validate", help="run the analytic constraint suite")
    p.add_argument("--solid", required=True)
    p.add_argument("--samples", type=int, default=None, help="rg2 oracle samples")
    p.add_argument("--seed", type=int, default=None, help="rg2 oracle seed")
    for name in DEFAULT_TOLERANCES:
        flag = {
            "gamma_at_0": "--tol-gamma0",
            "slope_at_0": "--tol-slope0",
            "gamma_at_dmax": "--tol-gamma-dmax",
            "slope_at_dmax": "--tol-slope-dmax",
            "volume_moment": "--tol-volume",
            "gyration_moment": "--tol-gyration",
        }[name]
        p.add_argument(flag, type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("intensity", help="scattering intensity curves")
    p.add_argument("--solid", action="append", required=True)
    _add_grid_args(p, "q", default_max=50.0)
    p.add_argument("--porod", action="store_true", help="add q^4 I columns")
    p.add_argument("--scale-q0", action="store_true", help="scale to 1 at q=0")
    p.add_argument("--normalize-dmax", action="store_true")
    p.add_argument("--mc", action="store_true")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_intensity)

    p = sub.add_parser("polydisperse", help="size-dispersion smeared intensity")
    p.add_argument("--solid", required=True)
    p.add_argument("--dist", required=True, help="e.g. poisson:4,1 or point:2")
    _add_grid_args(p, "q", default_max=20.0)
    p.add_argument("--scale-q0", action="store_true")
    p.add_argument("--normalize-dmax", action="store_true")
    p.add_argument("--emit-density", default=None, help="write d,p(d) table here")
    p.add_argument("--density-points", type=int, default=400)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_polydisperse)

    p = sub.add_parser("compare", help="five-solid comparison at unit dmax")
    p.add_argument("--outdir", required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--qmax", type=float, default=30.0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    words = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(words)
    args.invocation = " ".join(["polycf", *words])
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
