"""Command-line front end.

Commands
    solve     produce an optimal curve for a given p (closed form, ODE, or
              direct minimization), writing curve CSV, JSON report, and an
              optional SVG
    eval      compute A, M, D for a curve file
    residual  stationarity-residual profile for a curve file
    mc        Monte Carlo estimate of M for a curve file
    sweep     one certified solve per p in a list, with a summary CSV

Exit codes: 0 success (residual certified where applicable), 2 uncertified
residual, 64 usage error, 65 malformed or invalid curve data, 70 solver
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .curve_io import full_boundary_samples, read_curve_csv, write_full_csv
from .errors import BlobError, ConvergenceError, CsvFormatError, CurveValidationError, QuadratureError
from .functionals import METHOD_MC, d_value, monte_carlo_m
from .geometry import assemble_full
from .metrics import PNorm
from .optimizer import minimize_d
from .parallel import resolve_threads
from .quadrature import QuadratureSpec
from .report import DISPUTED_D_EUCLIDEAN, RunReport, p_to_json
from .special_solvers import solve_p1, solve_p2, solve_pinf
from .svg_render import write_boundary_svg
from .variational import full_residual_profile, octant_residual_profile

EXIT_OK = 0
EXIT_UNCERTIFIED = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_SOLVER = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_p(text: str) -> PNorm:
    try:
        return PNorm.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _quad_spec(args) -> QuadratureSpec:
    return QuadratureSpec(points_per_axis=args.points,
                          split_at_kinks=not args.no_split,
                          relative_tolerance=args.qtol)


def _add_quad_flags(sub):
    sub.add_argument("--points", type=int, default=32,
                     help="Gauss points per panel and axis (default 32)")
    sub.add_argument("--qtol", type=float, default=1e-6,
                     help="quadrature relative tolerance (default 1e-6)")
    sub.add_argument("--no-split", action="store_true",
                     help="disable kink splitting (diagnostics only)")


def build_parser() -> _Parser:
    parser = _Parser(prog="blobshape",
                     description="Optimal region shapes for average pairwise "
                                 "L_p distance")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: BLOB_THREADS or all cores)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("solve", help="solve for the optimal curve at p")
    sp.add_argument("--p", required=True, help="metric parameter (>= 1 or 'inf')")
    sp.add_argument("--method", choices=["auto", "closed_form", "ode", "variational"],
                    default="auto")
    sp.add_argument("--resolution", type=int, default=1025,
                    help="curve CSV sample count (default 1025)")
    sp.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    sp.add_argument("--grid-size", type=int, default=2048,
                    help="ODE output grid size (default 2048)")
    sp.add_argument("--k", type=int, default=8,
                    help="coefficient count for the variational method")
    sp.add_argument("--budget", type=int, default=200,
                    help="evaluation budget per restart (variational)")
    sp.add_argument("--restarts", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--residual-nodes", type=int, default=33)
    sp.add_argument("--residual-threshold", type=float, default=1e-4,
                    help="certification threshold on the residual sup-norm")
    sp.add_argument("--out-csv", default=None)
    sp.add_argument("--out-json", default=None)
    sp.add_argument("--out-svg", default=None)
    _add_quad_flags(sp)

    ev = sub.add_parser("eval", help="A, M, D for a curve file")
    ev.add_argument("curve_file")
    ev.add_argument("--p", required=True)
    ev.add_argument("--out-json", default=None)
    _add_quad_flags(ev)

    rs = sub.add_parser("residual", help="stationarity residual profile")
    rs.add_argument("curve_file")
    rs.add_argument("--p", required=True)
    rs.add_argument("--nodes", type=int, default=33)
    rs.add_argument("--form", choices=["octant", "full"], default="octant")
    rs.add_argument("--threshold", type=float, default=1e-4)
    rs.add_argument("--out-json", default=None)
    rs.add_argument("--out-csv", default=None)
    _add_quad_flags(rs)

    mc = sub.add_parser("mc", help="Monte Carlo estimate of M")
    mc.add_argument("curve_file")
    mc.add_argument("--p", required=True)
    mc.add_argument("--samples", type=int, default=10**6)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--out-json", default=None)

    sw = sub.add_parser("sweep", help="solve across a list of p values")
    sw.add_argument("--p-list", required=True,
                    help="comma-separated p values, e.g. '1,1.5,2,inf'")
    sw.add_argument("--out-dir", required=True)
    sw.add_argument("--tol", type=float, default=1e-10)
    sw.add_argument("--grid-size", type=int, default=2048)
    sw.add_argument("--k", type=int, default=6)
    sw.add_argument("--budget", type=int, default=120)
    sw.add_argument("--restarts", type=int, default=2)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--resolution", type=int, default=1025)
    sw.add_argument("--residual-threshold", type=float, default=1e-4)
    _add_quad_flags(sw)
    return parser


def _auto_method(p: PNorm) -> str:
    if p.value == 2.0:
        return "closed_form"
    if p.is_inf or p.value == 1.0:
        return "ode"
    return "variational"


def _run_solve(args, threads) -> int:
    p = _parse_p(args.p)
    method = args.method if args.method != "auto" else _auto_method(p)
    if method == "closed_form" and p.value != 2.0:
        raise UsageError("closed_form is only available at p = 2")
    if method == "ode" and not (p.is_inf or p.value == 1.0):
        raise UsageError("ode is only available at p = 1 or p = inf")

    t0 = time.perf_counter()
    solver_meta = {"method": method, "tol": args.tol}
    if method == "closed_form":
        curve = solve_p2()
    elif method == "ode":
        solver_fn = solve_p1 if p.value == 1.0 else solve_pinf
        curve, record = solver_fn(tol=args.tol, grid_size=args.grid_size)
        solver_meta.update({
            "grid_size": args.grid_size,
            "iterations": record.iterations,
            "f1": record.f1,
            "reduced_residual_sup": record.residual_sup,
            "h_prime_end": record.h_prime_end,
        })
    else:
        curve, trace = minimize_d(p, k=args.k, init="circle", budget=args.budget,
                                  seed=args.seed, restarts=args.restarts,
                                  threads=threads)
        solver_meta.update({
            "k": args.k,
            "budget": args.budget,
            "restarts": args.restarts,
            "evaluations": trace.evaluations,
            "termination": trace.termination,
            "accepted_iterates": len(trace.iterates),
        })

    q = _quad_spec(args)
    rep = d_value(curve, p, q, threads=threads)
    profile = octant_residual_profile(
        curve, p, QuadratureSpec(q.points_per_axis, q.split_at_kinks, 1e-3),
        nodes=args.residual_nodes, threads=threads)

    report = RunReport(
        command="solve",
        p=p,
        method=method,
        area=rep.area,
        m=rep.m_value,
        d=rep.d_value,
        residual_sup=profile.sup_norm,
        residual_l2=profile.l2_norm,
        a=curve.a,
        solver=solver_meta,
        seed=args.seed if method == "variational" else None,
    )
    if method in ("closed_form", "variational") and p.value == 2.0:
        report.disputed_reference = DISPUTED_D_EUCLIDEAN
    report.timing_ms = 1000.0 * (time.perf_counter() - t0)

    if args.out_csv:
        write_full_csv(args.out_csv, curve, resolution=args.resolution)
    if args.out_svg:
        xs, ws = full_boundary_samples(curve, resolution=args.resolution)
        write_boundary_svg(args.out_svg, xs, ws)
    if args.out_json:
        report.write(args.out_json)
    print(report.to_json(), end="")
    return EXIT_OK if profile.sup_norm <= args.residual_threshold else EXIT_UNCERTIFIED


def _run_eval(args, threads) -> int:
    p = _parse_p(args.p)
    curve = read_curve_csv(args.curve_file)
    t0 = time.perf_counter()
    q = _quad_spec(args)
    rep = d_value(curve, p, q, threads=threads)
    report = RunReport(
        command="eval",
        p=p,
        method=rep.method,
        area=rep.area,
        m=rep.m_value,
        d=rep.d_value,
        a=curve.a,
        solver={"error_estimate": rep.error_estimate},
    )
    report.timing_ms = 1000.0 * (time.perf_counter() - t0)
    if args.out_json:
        report.write(args.out_json)
    print(report.to_json(), end="")
    return EXIT_OK


def _run_residual(args, threads) -> int:
    p = _parse_p(args.p)
    curve = read_curve_csv(args.curve_file)
    t0 = time.perf_counter()
    q = QuadratureSpec(points_per_axis=args.points,
                       split_at_kinks=not args.no_split,
                       relative_tolerance=max(args.qtol, 1e-5))
    if args.form == "octant":
        profile = octant_residual_profile(curve, p, q, nodes=args.nodes,
                                          threads=threads)
    else:
        profile = full_residual_profile(assemble_full(curve), p, q,
                                        nodes=args.nodes, threads=threads)
    report = RunReport(
        command="residual",
        p=p,
        method=args.form,
        residual_sup=profile.sup_norm,
        residual_l2=profile.l2_norm,
        a=curve.a,
        solver={"nodes": args.nodes, "threshold": args.threshold},
    )
    report.timing_ms = 1000.0 * (time.perf_counter() - t0)
    if args.out_json:
        report.write(args.out_json)
    if args.out_csv:
        with open(args.out_csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "residual", "normalized"])
            for t, r, nr in zip(profile.t_nodes, profile.residuals,
                                profile.normalized):
                writer.writerow([format(t, ".17g"), format(r, ".17g"),
                                 format(nr, ".17g")])
    print(report.to_json(), end="")
    return EXIT_OK if profile.sup_norm <= args.threshold else EXIT_UNCERTIFIED


def _run_mc(args, threads) -> int:
    p = _parse_p(args.p)
    curve = read_curve_csv(args.curve_file)
    t0 = time.perf_counter()
    wb = assemble_full(curve)
    estimate, se = monte_carlo_m(wb, p, args.samples, args.seed, threads=threads)
    from .functionals import area_octant

    area = area_octant(curve)
    report = RunReport(
        command="mc",
        p=p,
        method=METHOD_MC,
        area=area,
        m=estimate,
        d=estimate / area**2.5,
        a=curve.a,
        solver={"samples": args.samples, "standard_error": se,
                "d_standard_error": se / area**2.5},
        seed=args.seed,
    )
    report.timing_ms = 1000.0 * (time.perf_counter() - t0)
    if args.out_json:
        report.write(args.out_json)
    print(report.to_json(), end="")
    return EXIT_OK


def _run_sweep(args, threads) -> int:
    entries = [tok.strip() for tok in args.p_list.split(",") if tok.strip()]
    if not entries:
        raise UsageError("empty p list")
    p_values = [_parse_p(tok) for tok in entries]
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    all_ok = True
    for tok, p in zip(entries, p_values):
        tag = "inf" if p.is_inf else tok
        solve_args = argparse.Namespace(
            p=tok, method="auto", resolution=args.resolution, tol=args.tol,
            grid_size=args.grid_size, k=args.k, budget=args.budget,
            restarts=args.restarts, seed=args.seed, residual_nodes=17,
            residual_threshold=args.residual_threshold,
            out_csv=os.path.join(args.out_dir, f"curve_p{tag}.csv"),
            out_json=os.path.join(args.out_dir, f"report_p{tag}.json"),
            out_svg=None, points=args.points, qtol=args.qtol,
            no_split=args.no_split)
        try:
            code = _run_solve(solve_args, threads)
            with open(solve_args.out_json) as fh:
                rep = json.load(fh)
            rows.append((tag, rep["d"], rep["a"],
                         "ok" if code == EXIT_OK else "uncertified"))
            all_ok = all_ok and code == EXIT_OK
        except BlobError as exc:
            rows.append((tag, math.nan, math.nan, f"error: {exc}"))
            all_ok = False
    summary = os.path.join(args.out_dir, "summary.csv")
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "D", "a", "status"])
        for tag, d, a, status in rows:
            writer.writerow([tag, format(d, ".17g"), format(a, ".17g"), status])
    finite = [r for r in rows if not math.isnan(r[1])]
    decreasing = all(finite[i][1] >= finite[i + 1][1] - 1e-9
                     for i in range(len(finite) - 1))
    print(json.dumps({"command": "sweep", "rows": len(rows),
                      "summary": summary, "d_decreasing": decreasing},
                     indent=2))
    return EXIT_OK if all_ok else EXIT_UNCERTIFIED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        threads = resolve_threads(args.threads)
        handler = {
            "solve": _run_solve,
            "eval": _run_eval,
            "residual": _run_residual,
            "mc": _run_mc,
            "sweep": _run_sweep,
        }[args.cmd]
        return handler(args, threads)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CsvFormatError, CurveValidationError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, QuadratureError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def console_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
