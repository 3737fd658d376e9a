"""Command-line front end.

Exit codes: 0 success / converged, 1 evaluation or input failure, 2 usage
error (including missing exact solution or hypothesis data), 3 contraction
hypothesis not verified (``check``), 4 iteration limit reached (``solve``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from fiesolve.analysis import contraction_constant
from fiesolve.chebyshev import quadrature_rule
from fiesolve.errors import FieError
from fiesolve.problem import HypothesisData, ProblemSpec, builtin_example, load_problem
from fiesolve.solver import (
    SolverConfig,
    SolveReport,
    Termination,
    picard_solve,
    quad_sweep,
    sample_solution,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NOT_CONTRACTION = 3
EXIT_MAX_ITER = 4

DEFAULT_SWEEP_N = (4, 6, 8, 10, 12, 14, 16, 18, 20, 25, 30)
DEFAULT_SWEEP_ITERS = (2, 10, 20)


class UsageError(Exception):
    pass


def fmt(x: Optional[float]) -> str:
    """15 significant digits in scientific notation."""
    if x is None:
        return ""
    return f"{x:.14e}"


def _json_number(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


@dataclass
class RunManifest:
    subcommand: str
    example: Optional[int]
    problem_path: Optional[Path]
    config: SolverConfig
    out: Optional[Path]
    output_format: str
    sweep_N: tuple[int, ...] = ()
    sweep_iters: tuple[int, ...] = ()

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunManifest":
        try:
            config = SolverConfig(
                degree_M=args.degree,
                quad_points_N=args.quad,
                tol=args.tol,
                max_iter=args.max_iter,
                residual_p=args.p,
                fixed_iterations=args.subcommand == "table",
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        manifest = cls(
            subcommand=args.subcommand,
            example=args.example,
            problem_path=args.problem,
            config=config,
            out=args.out,
            output_format=args.format,
        )
        if args.subcommand == "sweep":
            manifest.sweep_N = _int_list(args.quad_values, "--quad-values", minimum=2)
            manifest.sweep_iters = _int_list(args.iterations, "--iterations", minimum=0)
        return manifest

    def load(self) -> tuple[ProblemSpec, Optional[HypothesisData]]:
        if self.example is not None:
            return builtin_example(self.example)
        return load_problem(self.problem_path.read_text(encoding="utf-8"))


def _int_list(text: str, flag: str, minimum: int) -> tuple[int, ...]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise UsageError(f"{flag} must list at least one integer")
    try:
        values = tuple(int(item) for item in items)
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if any(v < minimum for v in values):
        raise UsageError(f"{flag} values must be >= {minimum}")
    return values


def _write(manifest: RunManifest, text: str) -> None:
    if manifest.out is None:
        sys.stdout.write(text)
    else:
        manifest.out.write_text(text, encoding="utf-8", newline="")


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _failure(report: SolveReport) -> int:
    print(f"error: {report.failure}", file=sys.stderr)
    return EXIT_FAILURE


def cmd_table(manifest: RunManifest) -> int:
    spec, hyp = manifest.load()
    if not spec.has_exact:
        print("error: table needs a problem with an exact solution", file=sys.stderr)
        return EXIT_USAGE
    report = picard_solve(spec, manifest.config, hyp)
    if report.termination is Termination.EVALUATION_FAILED:
        return _failure(report)
    rows = [(n, fmt(err)) for n, err in enumerate(report.error_history, start=1)]
    if manifest.output_format == "json":
        _write(manifest, json.dumps({"iteration": [r[0] for r in rows],
                                     "l2_error": report.error_history}, indent=2) + "\n")
    else:
        _write(manifest, _csv_text(("iteration", "l2_error"), rows))
    return EXIT_OK


def _check_text(report) -> str:
    d = report.as_dict()
    lines = [
        f"N = {fmt(d['N'])}",
        f"is_contraction = {'true' if d['is_contraction'] else 'false'}",
        f"p = {fmt(d['p'])}",
        f"lambda_range = ({fmt(1.0)}, {fmt(d['lambda_max'])})",
        f"default_lambda = {fmt(d['default_lambda']) or 'none'}",
        f"alpha_at_default_lambda = {fmt(d['alpha_at_default_lambda']) or 'none'}",
        "",
    ]
    return "\n".join(lines) + _csv_text(("t", "M1"), [(fmt(t), fmt(m)) for t, m in report.M1_samples])


def cmd_check(manifest: RunManifest) -> int:
    spec, hyp = manifest.load()
    if hyp is None:
        print("error: check needs hypothesis data (lipschitz_M, lipschitz_L)", file=sys.stderr)
        return EXIT_USAGE
    outer = quadrature_rule(max(2 * manifest.config.degree_M, 40), spec.interval)
    report = contraction_constant(spec, hyp, outer, outer)
    if manifest.output_format == "json":
        d = {k: _json_number(v) if not isinstance(v, list) else v for k, v in report.as_dict().items()}
        _write(manifest, json.dumps({"problem": spec.name, "contraction": d}, indent=2) + "\n")
    else:
        _write(manifest, _check_text(report))
    return EXIT_OK if report.is_contraction else EXIT_NOT_CONTRACTION


def _report_json(spec: ProblemSpec, config: SolverConfig, report: SolveReport) -> dict:
    contraction = None
    if report.contraction is not None:
        contraction = {
            k: _json_number(v) if not isinstance(v, list) else v
            for k, v in report.contraction.as_dict().items()
        }
    return {
        "problem": {"name": spec.name, "a": spec.interval.a, "b": spec.interval.b},
        "config": {
            "degree_M": config.degree_M,
            "quad_points_N": config.quad_points_N,
            "tol": config.tol,
            "max_iter": config.max_iter,
            "residual_p": config.residual_p,
        },
        "contraction": contraction,
        "iterations_run": report.iterations_run,
        "residual_history": report.residual_history,
        "l2_residual_history": report.l2_residual_history,
        "error_history": report.error_history,
        "apriori_history": report.apriori_history,
        "y1_norm": _json_number(report.y1_norm),
        "termination": report.termination.value,
        "failure": report.failure,
        "coefficients": report.final.coeffs.tolist(),
        "samples": [list(pair) for pair in sample_solution(report.final)],
    }


def cmd_solve(manifest: RunManifest) -> int:
    spec, hyp = manifest.load()
    report = picard_solve(spec, manifest.config, hyp)
    if report.termination is Termination.EVALUATION_FAILED:
        return _failure(report)
    if manifest.output_format == "json":
        _write(manifest, json.dumps(_report_json(spec, manifest.config, report), indent=2) + "\n")
    else:
        rows = [(fmt(t), fmt(y)) for t, y in sample_solution(report.final)]
        _write(manifest, _csv_text(("t", "y"), rows))
        last = report.residual_history[-1] if report.residual_history else None
        print(
            f"termination={report.termination.value} iterations={report.iterations_run} "
            f"last_residual={fmt(last)}",
            file=sys.stderr,
        )
    return EXIT_OK if report.termination is Termination.CONVERGED else EXIT_MAX_ITER


def cmd_sweep(manifest: RunManifest) -> int:
    spec, _ = manifest.load()
    if not spec.has_exact:
        print("error: sweep needs a problem with an exact solution", file=sys.stderr)
        return EXIT_USAGE
    rows = quad_sweep(spec, manifest.config, manifest.sweep_iters, manifest.sweep_N)
    if manifest.output_format == "json":
        payload = [{"quad_points": N, "iteration": n, "l2_error": e} for N, n, e in rows]
        _write(manifest, json.dumps(payload, indent=2) + "\n")
    else:
        _write(manifest, _csv_text(("quad_points", "iteration", "l2_error"),
                                   [(N, n, fmt(e)) for N, n, e in rows]))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "check": cmd_check, "table": cmd_table, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--example", type=int, choices=(1, 2), help="built-in problem")
    source.add_argument("--problem", type=Path, help="problem configuration file")
    common.add_argument("--degree", type=int, default=10, help="collocation degree M")
    common.add_argument("--quad", type=int, default=10, help="quadrature points N")
    common.add_argument("--tol", type=float, default=1e-12, help="stopping tolerance")
    common.add_argument("--max-iter", type=int, default=50, dest="max_iter")
    common.add_argument("--p", type=float, default=2.0, help="norm exponent of the stopping test")
    common.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(
        prog="fiesolve",
        description="Successive approximation for y(t) = f(t, int k(t,s) g(s,y(s)) ds).",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("solve", parents=[common], help="solve and sample the solution")
    sub.add_parser("check", parents=[common], help="verify the contraction hypothesis")
    sub.add_parser("table", parents=[common], help="L2 error per iteration")
    sweep = sub.add_parser("sweep", parents=[common], help="error versus quadrature size")
    sweep.add_argument("--quad-values", default=",".join(map(str, DEFAULT_SWEEP_N)),
                       help="comma-separated quadrature sizes")
    sweep.add_argument("--iterations", default=",".join(map(str, DEFAULT_SWEEP_ITERS)),
                       help="comma-separated iteration counts")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = RunManifest.from_args(args)
        return COMMANDS[manifest.subcommand](manifest)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
