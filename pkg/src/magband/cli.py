"""Command-line surface: tau scans, minimization, verification, asymptotics.

Subcommands emit CSV or JSON (12 significant digits, LF line endings) and
can render companion figures next to the delimited output.  Exit codes:
0 success, 1 check or solver failure, 2 invalid configuration, 3 result
produced but its certificate failed.
"""

from __future__ import annotations

import argparse
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, checks, plotting
from .analysis import BracketError, find_minimum, gap_series, min_gaussian_bound
from .bandfuncs import ScanError, SolveOptions, scan
from .eigensolve import EigensolveError
from .operators import DEFAULT_N_CELLS, DEFAULT_PAD, Family

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_UNCERTIFIED = 3

FAMILY_CHOICES = [f.value for f in Family]


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse levels {text!r}") from exc
    if not levels or any(not 1 <= n <= 6 for n in levels):
        raise ValueError("levels must be a comma-separated list within 1..6")
    if len(set(levels)) != len(levels):
        raise ValueError("levels must be distinct")
    return levels


def _solve_options(args) -> SolveOptions:
    if args.n_cells < 16:
        raise ValueError("--n-cells must be at least 16")
    if args.pad <= 0.0:
        raise ValueError("--pad must be positive")
    if args.tol <= 0.0:
        raise ValueError("--tol must be positive")
    return SolveOptions(n_cells=args.n_cells, pad=args.pad, tol=args.tol)


def _git_describe() -> str | None:
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return proc.stdout.strip() if proc.returncode == 0 else None


def _provenance(opts: SolveOptions) -> dict:
    return {
        "n_cells": opts.n_cells,
        "pad": opts.pad,
        "tol": opts.tol,
        "version": __version__,
        "git_describe": _git_describe(),
    }


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _write_json(path: str | None, payload) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _grid(tau_min: float, tau_max: float, tau_step: float) -> np.ndarray:
    if not tau_step > 0.0:
        raise ValueError("--tau-step must be positive")
    if not tau_max > tau_min:
        raise ValueError("--tau-max must exceed --tau-min")
    count = int(np.floor((tau_max - tau_min) / tau_step + 1e-9)) + 1
    return tau_min + tau_step * np.arange(count)


def cmd_scan(args) -> int:
    opts = _solve_options(args)
    levels = _parse_levels(args.levels)
    family = Family(args.family)
    grid = _grid(args.tau_min, args.tau_max, args.tau_step)
    result = scan(
        family,
        args.m,
        levels,
        grid,
        with_derivatives=args.with_derivatives,
        opts=opts,
        jobs=args.jobs,
    )

    constants: dict[str, float] = {}
    if args.with_constants:
        constants["const_theta0"] = find_minimum(Family.DEGENNES_NEUMANN, n=1, opts=opts).value
        constants["const_upper_bound"] = min_gaussian_bound()

    if args.format == "csv":
        buffer = io.StringIO()
        header = "tau,level,value,err_est,deriv_fh"
        if constants:
            header += "," + ",".join(constants)
        buffer.write(header + "\n")
        for j, tau in enumerate(result.tau_grid):
            for i, level in enumerate(result.levels):
                deriv = "" if result.derivatives is None else _fmt(result.derivatives[i, j])
                row = f"{_fmt(tau)},{level},{_fmt(result.values[i, j])},{_fmt(result.errors[i, j])},{deriv}"
                if constants:
                    row += "," + ",".join(_fmt(v) for v in constants.values())
                buffer.write(row + "\n")
        _write_text(args.out, buffer.getvalue())
    else:
        rows = []
        for j, tau in enumerate(result.tau_grid):
            for i, level in enumerate(result.levels):
                row = {
                    "tau": result.tau_grid[j],
                    "level": level,
                    "value": result.values[i, j],
                    "err_est": result.errors[i, j],
                    "deriv_fh": None if result.derivatives is None else result.derivatives[i, j],
                }
                rows.append(row)
        payload = {
            "family": family.value,
            "m": args.m,
            "levels": list(levels),
            "constants": constants or None,
            "rows": rows,
            "provenance": _provenance(opts),
        }
        _write_json(args.out, payload)

    if args.plot:
        plotting.save_band_figure(result, args.plot, constants=constants or None)
    if args.plot_gap:
        if not {1, 2} <= set(levels):
            raise ValueError("--plot-gap needs levels 1 and 2 in the scan")
        plotting.save_gap_figure(result.tau_grid, gap_series(result), args.plot_gap)
    return EXIT_OK


def cmd_minimize(args) -> int:
    opts = _solve_options(args)
    family = Family(args.family)
    bracket = tuple(args.bracket) if args.bracket else None
    report = find_minimum(
        family, m=args.m, n=args.level, bracket=bracket, tol=args.min_width, opts=opts
    )

    # Certificate: small derivative at the minimizer, positive curvature,
    # and a derivative sign change across a +-1e-3 window.
    left = analysis._band_derivative(family, args.m, report.tau_star - 1e-3, args.level, opts)
    right = analysis._band_derivative(family, args.m, report.tau_star + 1e-3, args.level, opts)
    certified = (
        abs(report.derivative_at_min) <= 1e-3
        and report.second_derivative_estimate > 0.0
        and left < 0.0 < right
    )
    payload = {
        "family": family.value,
        "m": args.m,
        "level": args.level,
        "tau_star": report.tau_star,
        "value": report.value,
        "derivative_at_min": report.derivative_at_min,
        "second_derivative_estimate": report.second_derivative_estimate,
        "bracket": list(report.bracket),
        "iterations": report.iterations,
        "certified": certified,
        "certificate": {"derivative_left": left, "derivative_right": right},
        "provenance": _provenance(opts),
    }
    _write_json(args.out, payload)
    return EXIT_OK if certified else EXIT_UNCERTIFIED


def cmd_verify(args) -> int:
    opts = _solve_options(args)
    ws = checks.Workspace(opts=opts, jobs=args.jobs)
    results = checks.run_suite(args.suite, ws)
    passed = all(r.passed for r in results)
    payload = {
        "suite": args.suite,
        "passed": passed,
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "measured": r.measured,
                "criterion": r.criterion,
            }
            for r in results
        ],
        "provenance": _provenance(opts),
    }
    _write_json(args.out, payload)
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_asymptotics(args) -> int:
    opts = _solve_options(args)
    family = Family(args.family)
    payload: dict = {"family": family.value, "provenance": _provenance(opts)}

    if family is Family.AXISYM:
        tau_min = 6.0 if args.tau_min is None else args.tau_min
        tau_max = 12.0 if args.tau_max is None else args.tau_max
        fits = []
        for level in _parse_levels(args.levels):
            fit = analysis.asymptotic_fit(
                family, args.m, level, (tau_min, tau_max), n_samples=args.n_samples, opts=opts
            )
            fits.append(
                {
                    "level": fit.level,
                    "m": fit.m,
                    "tau_range": list(fit.tau_range),
                    "c0": fit.fitted_c0,
                    "c2": fit.fitted_c2,
                    "c4": fit.fitted_c4,
                    "max_residual": fit.residual,
                }
            )
            if args.plot:
                taus = np.linspace(tau_min, tau_max, args.n_samples)
                from .bandfuncs import band_value
                from .operators import OperatorSpec

                values = np.array(
                    [band_value(OperatorSpec(family, t, args.m), level, opts).value for t in taus]
                )
                plotting.save_fit_figure(fit, taus, values, args.plot)
        payload["fits"] = fits
    else:
        tau_min = 2.5 if args.tau_min is None else args.tau_min
        tau_max = 3.5 if args.tau_max is None else args.tau_max
        tail_opts = SolveOptions(
            n_cells=max(opts.n_cells, analysis.TAIL_MIN_CELLS), pad=opts.pad, tol=opts.tol
        )
        rep = analysis.degennes_tail_check(
            n=min(_parse_levels(args.levels)),
            tau_range=(tau_min, tau_max),
            n_samples=args.n_samples,
            opts=tail_opts,
        )
        payload["tail_check"] = {
            "level": rep.level,
            "taus": list(rep.taus),
            "neumann_ratios": list(rep.neumann_ratios),
            "dirichlet_ratios": list(rep.dirichlet_ratios),
            "neumann_below": rep.neumann_below,
            "dirichlet_above": rep.dirichlet_above,
            "in_window": rep.in_window,
            "trending": rep.trending,
        }
    _write_json(args.out, payload)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-cells", type=int, default=DEFAULT_N_CELLS,
                        help="coarse-mesh cell count (Richardson partner doubles it)")
    parser.add_argument("--pad", type=float, default=DEFAULT_PAD,
                        help="domain padding beyond the potential well")
    parser.add_argument("--tol", type=float, default=1e-12, help="eigenvalue bisection tolerance")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--jobs", type=int, default=0,
                        help="parallel scan workers; 0 = all cores, 1 = serial")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magband",
        description="band functions of the axisymmetric magnetic and de Gennes operator families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="tabulate band values over a tau grid")
    p_scan.add_argument("--family", required=True, choices=FAMILY_CHOICES)
    p_scan.add_argument("--m", type=int, default=0, help="magnetic quantum number (axisym only)")
    p_scan.add_argument("--levels", default="1", help="comma-separated levels, e.g. 1,2")
    p_scan.add_argument("--tau-min", type=float, required=True)
    p_scan.add_argument("--tau-max", type=float, required=True)
    p_scan.add_argument("--tau-step", type=float, required=True)
    p_scan.add_argument("--format", choices=["csv", "json"], default="csv")
    p_scan.add_argument("--with-derivatives", action="store_true",
                        help="add the derivative column (axisym and Neumann families)")
    p_scan.add_argument("--with-constants", action="store_true",
                        help="append the 2D ground energy and the Gaussian bound as constant columns")
    p_scan.add_argument("--plot", default=None, help="render the band curves to this image file")
    p_scan.add_argument("--plot-gap", default=None,
                        help="render zeta2 - 3 zeta1 to this image file (needs levels 1,2)")
    _add_common(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_min = sub.add_parser("minimize", help="locate and certify a band minimum")
    p_min.add_argument("--family", required=True, choices=FAMILY_CHOICES)
    p_min.add_argument("--m", type=int, default=0)
    p_min.add_argument("--level", type=int, default=1)
    p_min.add_argument("--bracket", type=float, nargs=2, default=None, metavar=("A", "B"))
    p_min.add_argument("--min-width", type=float, default=1e-6,
                       help="golden-section bracket width target")
    _add_common(p_min)
    p_min.set_defaults(func=cmd_minimize)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", required=True, choices=sorted(checks.SUITES))
    _add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_asym = sub.add_parser("asymptotics", help="large-tau fits and exponential tail checks")
    p_asym.add_argument("--family", default="axisym", choices=FAMILY_CHOICES)
    p_asym.add_argument("--m", type=int, default=0)
    p_asym.add_argument("--levels", default="1")
    p_asym.add_argument("--tau-min", type=float, default=None)
    p_asym.add_argument("--tau-max", type=float, default=None)
    p_asym.add_argument("--n-samples", type=int, default=13)
    p_asym.add_argument("--plot", default=None, help="render the fit to this image file")
    _add_common(p_asym)
    p_asym.set_defaults(func=cmd_asymptotics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except EigensolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (BracketError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
