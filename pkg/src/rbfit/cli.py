"""Command-line interface.

Subcommands:

* ``fit``        — fit a model to CSV point data, save it as JSON.
* ``eval``       — evaluate a saved model over a Cartesian grid, write CSV.
* ``diagnose``   — conditioning/determinant report for one configuration.
* ``experiment translation`` — the translation sweep; JSON report.

The report-producing commands also render PNG figures next to the report
unless ``--no-plots`` is given.  Exit codes: 0 success, 2 usage or
configuration error, 3 input-data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys


from . import io
from .assembly import PolyBasis, assemble_sparse
from .diagnostics import diagnose, translation_experiment
from .exceptions import ConfigurationError, DataError, NumericalError
from .kernels import KERNEL_NAMES, kernel_from_name, kernel_is_compact
from .solve import DEFAULT_CG_TOL, SOLVER_NAMES, GridSpec, evaluate_grid, fit

__all__ = ["main", "entry"]


def _add_kernel_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", required=True, choices=KERNEL_NAMES, help="radial kernel")
    parser.add_argument("--shape", type=float, default=1.0, help="shape parameter (default 1.0)")
    parser.add_argument(
        "--degree",
        default="1",
        choices=("none", "0", "1", "2"),
        help="polynomial tail degree, or 'none' (default 1)",
    )


def _parse_degree(text: str) -> int | None:
    return None if text == "none" else int(text)


def _add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--solver", default="direct", choices=SOLVER_NAMES, help="solver path")
    parser.add_argument("--cg-tol", type=float, default=DEFAULT_CG_TOL, help="CG relative residual")
    parser.add_argument("--cg-max-iter", type=int, default=None, help="CG iteration cap (default 10N)")


def _parse_grid(text: str) -> GridSpec:
    mins, maxs, counts = [], [], []
    for axis in text.split(","):
        parts = axis.split(":")
        if len(parts) != 3:
            raise ConfigurationError(
                f"bad grid axis {axis!r}; expected min:max:count (comma-separated per axis)"
            )
        try:
            mins.append(float(parts[0]))
            maxs.append(float(parts[1]))
            counts.append(int(parts[2]))
        except ValueError:
            raise ConfigurationError(f"bad grid axis {axis!r}; expected numbers min:max:count") from None
    try:
        return GridSpec(tuple(mins), tuple(maxs), tuple(counts))
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None


def _parse_offsets(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"bad offsets {text!r}; expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbfit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit an interpolant to CSV point data")
    p_fit.add_argument("--input", required=True, help="points CSV (header x,h | x,y,h | x,y,z,h)")
    p_fit.add_argument("--output", required=True, help="model JSON path")
    _add_kernel_args(p_fit)
    _add_solver_args(p_fit)
    p_fit.add_argument("--no-normalize", action="store_true", help="fit in raw coordinates")

    p_eval = sub.add_parser("eval", help="evaluate a saved model over a grid")
    p_eval.add_argument("--model", required=True, help="model JSON path")
    p_eval.add_argument("--output", required=True, help="grid CSV path")
    p_eval.add_argument(
        "--grid", required=True, help="per-axis min:max:count, comma-separated, e.g. 0:1:50,0:1:50"
    )

    p_diag = sub.add_parser("diagnose", help="conditioning and determinant report")
    p_diag.add_argument("--input", required=True)
    _add_kernel_args(p_diag)
    p_diag.add_argument("--no-normalize", action="store_true", help="assemble raw coordinates")
    p_diag.add_argument("--report", required=True, help="report JSON path")
    p_diag.add_argument("--no-plots", action="store_true", help="skip PNG figures")

    p_exp = sub.add_parser("experiment", help="reproducible numerical experiments")
    exp_sub = p_exp.add_subparsers(dest="experiment", required=True)
    p_tr = exp_sub.add_parser("translation", help="conditioning under rigid translation")
    p_tr.add_argument("--input", required=True)
    _add_kernel_args(p_tr)
    p_tr.add_argument(
        "--offsets", default="0,10,100,1000,10000", help="comma-separated offsets; must include 0"
    )
    p_tr.add_argument("--report", required=True, help="report JSON path")
    p_tr.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    return parser


def _cmd_fit(args) -> int:
    cloud = io.read_points_csv(args.input)
    kernel = kernel_from_name(args.kernel, args.shape)
    model = fit(
        cloud,
        kernel,
        degree=_parse_degree(args.degree),
        solver=args.solver,
        normalize=not args.no_normalize,
        cg_tol=args.cg_tol,
        cg_max_iter=args.cg_max_iter,
    )
    io.write_model_json(model, args.output)
    report = model.fit_report
    iters = f", iterations={report.iterations}" if report.iterations is not None else ""
    print(
        f"fitted {cloud.n} sites in {cloud.dim}-D with {args.kernel} "
        f"(solver={report.solver}, residual={report.residual:.3e}{iters}) -> {args.output}"
    )
    return 0


def _cmd_eval(args) -> int:
    model = io.read_model_json(args.model)
    grid = _parse_grid(args.grid)
    values = evaluate_grid(model, grid)
    io.write_grid_csv(values, grid, args.output)
    print(f"evaluated {grid.size} grid nodes -> {args.output}")
    return 0


def _cmd_diagnose(args) -> int:
    cloud = io.read_points_csv(args.input)
    kernel = kernel_from_name(args.kernel, args.shape)
    degree = _parse_degree(args.degree)
    poly = None if degree is None else PolyBasis(degree, cloud.dim)
    sparse_system = None
    if kernel_is_compact(kernel):
        sparse_system = assemble_sparse(cloud, kernel, poly)
    report = diagnose(cloud, kernel, poly, normalize=not args.no_normalize, sparse_system=sparse_system)
    io.write_json_report(report.to_json_dict(), args.report)
    print(f"diagnostics (n={report.n}, m={report.m}, cond={report.cond_full:.3e}) -> {args.report}")
    if not args.no_plots:
        from .plots import save_diagnostics_figures

        for path in save_diagnostics_figures(report, args.report, sparse_system=sparse_system):
            print(f"figure -> {path}")
    return 0


def _cmd_experiment_translation(args) -> int:
    cloud = io.read_points_csv(args.input)
    kernel = kernel_from_name(args.kernel, args.shape)
    degree = _parse_degree(args.degree)
    if degree is None:
        raise ConfigurationError("the translation experiment needs a polynomial tail (degree >= 0)")
    poly = PolyBasis(degree, cloud.dim)
    offsets = _parse_offsets(args.offsets)
    try:
        records = translation_experiment(cloud, kernel, poly, offsets)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    io.write_json_report([r.to_json_dict() for r in records], args.report)
    for rec in records:
        res = "-" if rec.residual is None else f"{rec.residual:.3e}"
        print(
            f"offset {rec.offset:>10g}: cond_raw={rec.cond_raw:.3e} "
            f"cond_normalized={rec.cond_normalized:.3e} max|PtP|={rec.max_ptp_entry:.3e} "
            f"residual={res} status={rec.status}"
        )
    print(f"report -> {args.report}")
    if not args.no_plots:
        from .plots import save_translation_figures

        for path in save_translation_figures(records, args.report):
            print(f"figure -> {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        if args.command == "experiment":
            return _cmd_experiment_translation(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    return 0


def entry() -> None:
    sys.exit(main())
