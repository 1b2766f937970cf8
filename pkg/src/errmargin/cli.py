"""Command-line front end: ``solve``, ``sweep``, ``verify`` and ``simulate``.

Exit codes: 0 ok, 1 verification failure, 2 bad parameters, 3 I/O failure.
Floats are written with 9 significant digits and JSON keys in a fixed order,
so identical invocations give byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .analytic import Domain, Solution, analytic_probabilities, critical_margins, solve
from .grids import MixedGridConfig, PureGridConfig, mixed_grid, pure_grid
from .montecarlo import simulate
from .oracle import NUMERIC_TOL, minimize_dual, primal_search, verify
from .states import ParameterError, build_family, check_margin, to_ensemble

EXIT_OK, EXIT_FAIL, EXIT_PARAM, EXIT_IO = 0, 1, 2, 3
AGREEMENT_TOL = 1e-6
CSV_HEADER = "m,p_max,p_error,p_inconclusive,domain"


def fmt(x: float) -> str:
    s = f"{float(x):.9g}"
    return "0" if s == "-0" else s


def _clean(obj):
    """Round floats to 9 significant digits, recursively."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return float(fmt(obj))
    if isinstance(obj, Domain):
        return obj.value
    return obj


def _dump(doc: dict, indent: int | None) -> None:
    sys.stdout.write(json.dumps(_clean(doc), indent=indent) + "\n")


def _operator_doc(op) -> dict:
    return {
        "scale": op.scale,
        "vector": list(op.vector),
        "eigenvalues": list(op.eigenvalues()),
        "rank": op.rank(),
    }


def solution_doc(sol: Solution) -> dict:
    cert = sol.certificate
    return {
        "parameters": {"r": sol.r, "gamma": sol.gamma, "margin": sol.m},
        "domain": sol.domain.value,
        "p_success": sol.p_success,
        "p_error": sol.p_error,
        "p_inconclusive": sol.p_inconclusive,
        "critical_margins": {"m_lower": sol.margins.m_lower, "m_upper": sol.margins.m_upper},
        "povm": {f"E{mu}": _operator_doc(e) for mu, e in enumerate(sol.povm.elements)},
        "certificate": {
            "y": cert.y,
            "Y_scale": cert.Y.scale,
            "Y_vector": list(cert.Y.vector),
            "d": cert.d,
        },
        "gap": sol.gap,
        "povm_source": sol.povm_source,
    }


def cmd_solve(args) -> int:
    sol = solve(args.r, args.gamma, args.margin, seed=args.seed)
    _dump(solution_doc(sol), args.json_indent)
    return EXIT_OK


def sweep_rows(r: float, gamma: float, steps: int) -> list[str]:
    rows = []
    for k in range(steps + 1):
        m = k / steps
        p_s, p_e, p_i, domain = analytic_probabilities(r, gamma, m)
        rows.append(",".join([fmt(m), fmt(p_s), fmt(p_e), fmt(p_i), domain.value]))
    return rows


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise ParameterError(f"steps={args.steps} must be positive")
    critical_margins(args.r, args.gamma)
    text = "\n".join([CSV_HEADER, *sweep_rows(args.r, args.gamma, args.steps)]) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _report_doc(report) -> dict:
    return {
        "povm_min_eig": report.povm_min_eig,
        "completeness_residual": report.completeness_residual,
        "margin_slack": report.margin_slack,
        "dual_slacks": list(report.dual_slacks),
        "attainability_residuals": list(report.attainability_residuals),
        "p_success": report.p_success,
        "d": report.d,
        "gap": report.gap,
        "pass": report.passed,
    }


def _grid_doc(result) -> dict:
    return {
        "grid": result.kind,
        "points": result.points,
        "max_agreement": result.max_agreement,
        "max_residual": result.max_residual,
        "max_gap": result.max_gap,
        "failures": result.failures,
        "pass": result.passed,
    }


def cmd_verify(args) -> int:
    if args.grid:
        critical_margins(args.r, 0.0 if args.gamma is None else args.gamma)
        if args.r == 1.0:
            result = pure_grid(PureGridConfig())
        else:
            result = mixed_grid(MixedGridConfig(seed=args.seed))
        _dump(_grid_doc(result), args.json_indent)
        return EXIT_OK if result.passed else EXIT_FAIL

    if args.gamma is None or args.margin is None:
        raise ParameterError("--gamma and --margin are required unless --grid is given")
    critical_margins(args.r, args.gamma)
    check_margin(args.margin)
    ensemble = to_ensemble(build_family(args.r, args.gamma))
    dual = minimize_dual(ensemble, args.margin)
    primal = primal_search(ensemble, args.margin, seed=args.seed)
    if args.r == 1.0:
        sol = solve(args.r, args.gamma, args.margin, seed=args.seed)
        report = verify(ensemble, args.margin, sol.povm, sol.certificate)
        p_analytic, source = sol.p_success, sol.povm_source
    else:
        p_analytic = analytic_probabilities(args.r, args.gamma, args.margin)[0]
        report = verify(
            ensemble, args.margin, primal.povm, dual.certificate(args.margin), numeric=True
        )
        source = "numeric"
    agreement = abs(dual.d_star - p_analytic)
    primal_gap = dual.d_star - primal.p_success
    passed = report.passed and agreement <= AGREEMENT_TOL and abs(primal_gap) <= NUMERIC_TOL
    doc = {
        "parameters": {"r": args.r, "gamma": args.gamma, "margin": args.margin, "seed": args.seed},
        "povm_source": source,
        "p_analytic": p_analytic,
        "oracle": {
            "y_star": dual.y_star,
            "d_star": dual.d_star,
            "inner_iterations": dual.inner_iterations,
            "primal_p_success": primal.p_success,
            "primal_p_error": primal.p_error,
            "restarts_used": primal.restarts_used,
        },
        "agreement": agreement,
        "primal_gap": primal_gap,
        "report": _report_doc(report),
        "pass": passed,
    }
    _dump(doc, args.json_indent)
    return EXIT_OK if passed else EXIT_FAIL


def _z(hat: float, p: float, shots: int):
    se = math.sqrt(p * (1.0 - p) / shots)
    if se == 0.0:
        return 0.0 if hat == p else None
    return (hat - p) / se


def cmd_simulate(args) -> int:
    if args.shots < 1:
        raise ParameterError(f"shots={args.shots} must be positive")
    sol = solve(args.r, args.gamma, args.margin, seed=args.seed)
    ensemble = to_ensemble(build_family(args.r, args.gamma))
    stats = simulate(ensemble, sol.povm, args.shots, args.seed)
    doc = {
        "parameters": {"r": args.r, "gamma": args.gamma, "margin": args.margin},
        "generator": stats.generator,
        "seed": stats.seed,
        "shots": stats.shots,
        "counts": stats.counts.tolist(),
        "p_success_hat": stats.p_success_hat,
        "p_error_hat": stats.p_error_hat,
        "p_inconclusive_hat": stats.p_inconclusive_hat,
        "stderr_success": stats.stderr_success,
        "analytic": {
            "p_success": sol.p_success,
            "p_error": sol.p_error,
            "p_inconclusive": sol.p_inconclusive,
        },
        "z_scores": {
            "success": _z(stats.p_success_hat, sol.p_success, args.shots),
            "error": _z(stats.p_error_hat, sol.p_error, args.shots),
            "inconclusive": _z(stats.p_inconclusive_hat, max(sol.p_inconclusive, 0.0), args.shots),
        },
        "povm_source": sol.povm_source,
    }
    _dump(doc, args.json_indent)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="errmargin",
        description="Discrimination with an error margin among three symmetric qubit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def family_args(p, required=True):
        p.add_argument("--gamma", type=float, required=required, help="pairwise Bloch overlap")
        p.add_argument("--r", type=float, default=1.0, help="purity |n_i|^2 (default 1)")

    def json_args(p):
        p.add_argument("--json-indent", type=int, default=None)

    p = sub.add_parser("solve", help="optimal value, POVM and dual certificate")
    family_args(p)
    p.add_argument("--margin", type=float, required=True)
    p.add_argument("--seed", type=int, default=0, help="seed for the numeric POVM (r < 1)")
    json_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="CSV of the optimum against the margin")
    family_args(p)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default="-", help='output path, or "-" for stdout')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check the closed form against the numeric oracle")
    family_args(p, required=False)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--grid", action="store_true", help="run the full agreement grid")
    p.add_argument("--seed", type=int, default=0)
    json_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the optimal measurement")
    family_args(p)
    p.add_argument("--margin", type=float, required=True)
    p.add_argument("--shots", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    json_args(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
