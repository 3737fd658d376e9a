"""Picard collocation solver."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fiesolve import ChebApproximant, cheb_grid, coeffs_from_values, quadrature_rule
from fiesolve.solver import (
    SolverConfig,
    Termination,
    error_rule,
    error_vs_exact,
    iteration_residual,
    picard_solve,
    quad_sweep,
)

EX1_ERRORS = {
    1: 0.139055224218022,
    2: 0.28090214152532e-01,
    3: 0.7514001013338e-02,
    4: 0.1557774788458e-02,
    5: 0.417391135550e-03,
    6: 0.86414955296e-04,
}


@pytest.fixture(scope="module")
def table_run():
    from fiesolve import builtin_example

    spec, hyp = builtin_example(1)
    return picard_solve(spec, SolverConfig(max_iter=20, fixed_iterations=True), hyp)


class TestSolverConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(degree_M=0), dict(quad_points_N=1), dict(tol=0.0), dict(max_iter=0), dict(residual_p=0.5)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_defaults(self):
        cfg = SolverConfig()
        assert (cfg.degree_M, cfg.quad_points_N, cfg.tol, cfg.max_iter, cfg.residual_p) == (10, 10, 1e-12, 50, 2.0)


class TestIterationResidual:
    def test_identical(self):
        assert iteration_residual([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_unit(self):
        assert iteration_residual([1.0, 0.0], [0.0, 0.0], 2.0) == 1.0

    def test_pythagoras(self):
        assert iteration_residual([3.0, 4.0], [0.0, 0.0], 2.0) == 5.0

    def test_max_norm(self):
        assert iteration_residual([3.0, -4.0], [0.0, 0.0], math.inf) == 4.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            iteration_residual([1.0], [1.0, 2.0])


class TestErrorVsExact:
    def test_interpolant_of_sine(self, unit):
        grid = cheb_grid(10, unit)
        approx = coeffs_from_values(np.sin(grid.mapped_nodes), grid)
        rule = quadrature_rule(40, unit)
        err = error_vs_exact(approx, np.sin, rule)
        assert err <= 1e-10
        # dense-sampling oracle: the sup of the difference bounds the L2 norm on [0, 1]
        ts = np.linspace(0, 1, 10001)
        assert err <= np.max(np.abs(approx(ts) - np.sin(ts))) + 1e-16

    def test_zero(self, unit):
        assert error_vs_exact(ChebApproximant.zero(4, unit), lambda t: 0.0 * t, quadrature_rule(10, unit)) == 0.0

    def test_one(self, unit):
        one = ChebApproximant(unit, [1.0])
        assert error_vs_exact(one, lambda t: 0.0 * t, quadrature_rule(10, unit)) == pytest.approx(1.0, abs=1e-15)


class TestPicardExample1:
    @pytest.mark.parametrize("n", sorted(EX1_ERRORS))
    def test_table_values(self, table_run, n):
        assert table_run.error_history[n - 1] == pytest.approx(EX1_ERRORS[n], rel=1e-6)

    def test_first_iterate_digits(self, table_run):
        assert table_run.error_history[0] == pytest.approx(0.139055224218022, rel=1e-10)

    def test_history_lengths(self, table_run):
        assert table_run.iterations_run == 20
        assert len(table_run.residual_history) == 20
        assert len(table_run.error_history) == 20
        assert len(table_run.apriori_history) == 21

    def test_geometric_decay(self, table_run):
        N = table_run.contraction.N
        errs = table_run.error_history
        for e0, e1 in zip(errs, errs[1:]):
            if e1 < 1e-11:
                break
            assert e1 / e0 <= N + 0.05

    def test_apriori_domination(self, table_run):
        bounds = table_run.apriori_history
        for n, err in enumerate(table_run.error_history, start=1):
            assert err <= bounds[n] + 1e-9

    def test_apriori_formula(self, table_run):
        N, K = table_run.contraction.N, table_run.y1_norm
        for n, b in enumerate(table_run.apriori_history):
            assert b == pytest.approx(N**n * K / (1 - N), rel=1e-14)

    def test_converges_with_tolerance(self, example1):
        spec, hyp = example1
        report = picard_solve(spec, SolverConfig(), hyp)
        assert report.termination is Termination.CONVERGED
        assert report.residual_history[-1] < 1e-12
        assert report.iterations_run <= 50
        assert report.final(0.5) == pytest.approx(math.sin(0.5), abs=1e-9)

    def test_max_iter(self, example1):
        report = picard_solve(example1[0], SolverConfig(max_iter=1))
        assert report.termination is Termination.MAX_ITER_REACHED
        assert report.iterations_run == 1
        assert report.apriori_history == []

    def test_determinism(self, example1):
        r1 = picard_solve(example1[0], SolverConfig(max_iter=30))
        r2 = picard_solve(example1[0], SolverConfig(max_iter=30))
        assert r1.residual_history == r2.residual_history
        assert r1.final.coeffs.tobytes() == r2.final.coeffs.tobytes()

    def test_no_exact_gives_no_errors(self, example1):
        from fiesolve import ProblemSpec

        spec = example1[0]
        bare = ProblemSpec(spec.interval, spec.kernel_k, spec.outer_f, spec.inner_g)
        assert picard_solve(bare, SolverConfig(max_iter=3)).error_history is None

    def test_initial_must_match(self, example1, unit):
        with pytest.raises(ValueError):
            picard_solve(example1[0], SolverConfig(), initial=ChebApproximant.zero(5, unit))


class TestStoppingSoundness:
    @pytest.mark.parametrize("tol,max_iter", [(1e-3, 50), (1e-8, 50), (1e-12, 50), (1e-12, 5), (1e-14, 100)])
    def test_converged_implies_small_residual(self, example1, tol, max_iter):
        report = picard_solve(example1[0], SolverConfig(tol=tol, max_iter=max_iter))
        assert report.iterations_run <= max_iter
        assert len(report.residual_history) == report.iterations_run
        if report.termination is Termination.CONVERGED:
            assert report.residual_history[-1] < tol
        else:
            assert report.iterations_run == max_iter


class TestFixedPoint:
    @pytest.mark.parametrize("which", [1, 2])
    def test_exact_interpolant_is_nearly_fixed(self, which, unit):
        from fiesolve import builtin_example

        spec, _ = builtin_example(which)
        grid = cheb_grid(10, unit)
        start = coeffs_from_values(spec.exact(grid.mapped_nodes), grid)
        report = picard_solve(spec, SolverConfig(quad_points_N=20, max_iter=1), initial=start)
        assert report.residual_history[0] <= 1e-8


class TestExample2:
    def test_first_step_leaves_log_domain(self, example2):
        spec, hyp = example2
        report = picard_solve(spec, SolverConfig(max_iter=20, fixed_iterations=True), hyp)
        assert report.termination is Termination.EVALUATION_FAILED
        assert report.iterations_run == 0
        assert report.failure.startswith("iteration 1:") and " in f at (t=1.0" in report.failure
        assert report.contraction is not None and not report.contraction.is_contraction


class TestQuadSweep:
    def test_plateau(self, example1):
        rows = quad_sweep(example1[0], SolverConfig(), [10], [10, 30])
        (_, _, e10), (_, _, e30) = rows
        assert abs(e10 - e30) <= 1e-9

    def test_zero_iterations(self, example1, unit):
        spec = example1[0]
        rows = quad_sweep(spec, SolverConfig(), [0], [6, 10])
        # ||sin||_2^2 on [0, 1] = 1/2 - sin(2)/4
        norm = math.sqrt(0.5 - math.sin(2.0) / 4)
        for _, _, e in rows:
            assert e == pytest.approx(norm, abs=1e-14)

    def test_second_iteration_column(self, example1):
        rows = quad_sweep(example1[0], SolverConfig(), [2], [10, 14, 20, 30])
        for _, _, e in rows:
            assert e == pytest.approx(0.28090214152532e-01, rel=1e-6)

    def test_row_order(self, example1):
        rows = quad_sweep(example1[0], SolverConfig(), [2, 1], [8, 6])
        assert [(N, n) for N, n, _ in rows] == [(8, 2), (8, 1), (6, 2), (6, 1)]

    def test_empty_lists(self, example1):
        with pytest.raises(ValueError):
            quad_sweep(example1[0], SolverConfig(), [2], [])
        with pytest.raises(ValueError):
            quad_sweep(example1[0], SolverConfig(), [], [10])


def test_error_rule_size(example1):
    assert error_rule(example1[0], SolverConfig(degree_M=30)).point_count_N == 60
    assert error_rule(example1[0], SolverConfig()).point_count_N == 40
