"""Picard iteration on Chebyshev collocation coefficients.

Each step samples the current approximant ``y_M`` at the quadrature nodes,
forms ``F_i = f(t_i, int k(t_i, s) g(s, y_M(s)) ds)`` at every collocation
node and solves ``T c_new = F`` with the LU factors of ``T`` computed once
per solve.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from fiesolve.analysis import ContractionReport, apriori_bound, contraction_constant, lp_norm
from fiesolve.chebyshev import (
    ChebApproximant,
    CollocationSolver,
    QuadratureRule,
    cheb_grid,
    quadrature_rule,
)
from fiesolve.errors import EvaluationError
from fiesolve.problem import HypothesisData, ProblemSpec, operator_values

log = logging.getLogger(__name__)


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITER_REACHED = "max_iter_reached"
    EVALUATION_FAILED = "evaluation_failed"


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``fixed_iterations`` runs exactly ``max_iter`` steps regardless of the
    stopping test (used to tabulate errors per iteration).
    """

    degree_M: int = 10
    quad_points_N: int = 10
    tol: float = 1e-12
    max_iter: int = 50
    residual_p: float = 2.0
    fixed_iterations: bool = False

    def __post_init__(self) -> None:
        if self.degree_M < 1:
            raise ValueError("degree_M must be >= 1")
        if self.quad_points_N < 2:
            raise ValueError("quad_points_N must be >= 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.residual_p >= 1:
            raise ValueError("residual_p must be >= 1")


@dataclass(frozen=True, eq=False)
class SolveReport:
    final: ChebApproximant
    iterations_run: int
    residual_history: list[float]
    error_history: Optional[list[float]]
    termination: Termination
    y1_norm: float
    apriori_history: list[float]
    l2_residual_history: list[float] = field(default_factory=list)
    iterates: list[ChebApproximant] = field(default_factory=list, repr=False)
    contraction: Optional[ContractionReport] = None
    failure: Optional[str] = None


def iteration_residual(c_new, c_old, p: float = 2.0) -> float:
    c_new = np.asarray(c_new, dtype=float)
    c_old = np.asarray(c_old, dtype=float)
    if c_new.shape != c_old.shape:
        raise ValueError(f"length mismatch: {c_new.shape} vs {c_old.shape}")
    if np.isinf(p):
        return float(np.max(np.abs(c_new - c_old)))
    return float(np.sum(np.abs(c_new - c_old) ** p) ** (1.0 / p))


def error_vs_exact(approx: ChebApproximant, exact: Callable, rule: QuadratureRule) -> float:
    """L2 distance between ``approx`` and ``exact`` computed with ``rule``."""
    return lp_norm(lambda s: approx(s) - exact(s), approx.interval, 2.0, rule)


def error_rule(spec: ProblemSpec, config: SolverConfig) -> QuadratureRule:
    """High-order rule for error norms, independent of the solve's own rule."""
    return quadrature_rule(max(2 * config.degree_M, 40), spec.interval)


def picard_solve(
    spec: ProblemSpec,
    config: SolverConfig,
    hyp: Optional[HypothesisData] = None,
    initial: Optional[ChebApproximant] = None,
) -> SolveReport:
    """Run the collocation Picard iteration from ``y_0 = 0`` (or ``initial``).

    When ``hyp`` is given, the contraction constant is computed with the
    high-order error rule and, if ``N < 1``, ``apriori_history[n]`` holds
    ``N^n ||y_1||_p / (1 - N)`` for ``n = 0 .. iterations_run``.
    ``error_history[k]`` is the L2 error of iterate ``k + 1`` when the
    problem has an exact solution.

    An evaluation fault (for instance a log argument leaving its domain)
    ends the solve with ``Termination.EVALUATION_FAILED``; ``final`` is then
    the last successfully computed iterate and ``failure`` describes the
    offending node and function.
    """
    grid = cheb_grid(config.degree_M, spec.interval)
    colloc = CollocationSolver.for_grid(grid)
    rule = quadrature_rule(config.quad_points_N, spec.interval)
    erule = error_rule(spec, config)
    p_norm = hyp.p if hyp is not None else 2.0

    contraction = None
    if hyp is not None:
        contraction = contraction_constant(spec, hyp, erule, erule)

    if initial is None:
        current = ChebApproximant.zero(config.degree_M, spec.interval)
    else:
        if initial.degree != config.degree_M or initial.interval != spec.interval:
            raise ValueError("initial iterate must match the grid degree and problem interval")
        current = initial

    residuals: list[float] = []
    l2_residuals: list[float] = []
    errors: Optional[list[float]] = [] if spec.has_exact else None
    iterates: list[ChebApproximant] = []
    termination = Termination.MAX_ITER_REACHED
    failure = None
    y1_norm = float("nan")

    for k in range(config.max_iter):
        try:
            F = operator_values(spec, current(rule.nodes), rule, grid.mapped_nodes)
        except EvaluationError as exc:
            exc.message = f"iteration {k + 1}: {exc.message}"
            failure = str(exc)
            termination = Termination.EVALUATION_FAILED
            log.info("solve of %s stopped: %s", spec.name, failure)
            break
        c_new = colloc.coefficients(F)
        if not np.all(np.isfinite(c_new)):
            failure = f"iteration {k + 1}: non-finite collocation coefficients"
            termination = Termination.EVALUATION_FAILED
            break
        new = ChebApproximant(spec.interval, c_new)
        residuals.append(iteration_residual(new.coeffs, current.coeffs, config.residual_p))
        prev = current
        l2_residuals.append(lp_norm(lambda s: new(s) - prev(s), spec.interval, 2.0, erule))
        if k == 0:
            y1_norm = lp_norm(new, spec.interval, p_norm, erule)
        if errors is not None:
            errors.append(error_vs_exact(new, spec.exact, erule))
        iterates.append(new)
        current = new
        if residuals[-1] < config.tol:
            termination = Termination.CONVERGED
            if not config.fixed_iterations:
                break
        elif config.fixed_iterations:
            termination = Termination.MAX_ITER_REACHED

    apriori: list[float] = []
    if contraction is not None and contraction.is_contraction and iterates:
        apriori = [apriori_bound(contraction.N, y1_norm, n) for n in range(len(iterates) + 1)]

    return SolveReport(
        final=current,
        iterations_run=len(iterates),
        residual_history=residuals,
        error_history=errors,
        termination=termination,
        y1_norm=y1_norm,
        apriori_history=apriori,
        l2_residual_history=l2_residuals,
        iterates=iterates,
        contraction=contraction,
        failure=failure,
    )


def quad_sweep(
    spec: ProblemSpec,
    config: SolverConfig,
    n_iters: Sequence[int],
    N_values: Sequence[int],
) -> list[tuple[int, int, float]]:
    """L2 error after ``n`` iterations for every quadrature size ``N``.

    Rows are ordered by ``N`` (as given) then ``n``. Each ``N`` is solved once
    for ``max(n_iters)`` fixed iterations; ``n = 0`` reports ``||exact||_2``
    since the starting iterate is zero.
    """
    if not spec.has_exact:
        raise ValueError("quad_sweep needs a problem with an exact solution")
    if not N_values or not n_iters:
        raise ValueError("N_values and n_iters must be non-empty")
    if any(n < 0 for n in n_iters):
        raise ValueError("iteration counts must be non-negative")
    n_max = max(n_iters)
    rows = []
    for N in N_values:
        cfg = SolverConfig(
            degree_M=config.degree_M,
            quad_points_N=N,
            tol=config.tol,
            max_iter=max(n_max, 1),
            residual_p=config.residual_p,
            fixed_iterations=True,
        )
        report = picard_solve(spec, cfg)
        if report.termination is Termination.EVALUATION_FAILED:
            raise EvaluationError(f"sweep with N = {N} failed: {report.failure}")
        erule = error_rule(spec, cfg)
        zero_err = lp_norm(spec.exact, spec.interval, 2.0, erule)
        for n in n_iters:
            rows.append((N, n, zero_err if n == 0 else report.error_history[n - 1]))
    return rows


def sample_solution(approx: ChebApproximant, count: int = 201) -> list[tuple[float, float]]:
    ts = np.linspace(approx.interval.a, approx.interval.b, count)
    return list(zip(ts.tolist(), np.atleast_1d(approx(ts)).tolist()))

