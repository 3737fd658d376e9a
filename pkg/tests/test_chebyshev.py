"""Tests for the Chebyshev basis, grids, quadrature and interpolation."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiesolve.chebyshev import (
    ChebApproximant,
    Interval,
    cheb_eval,
    cheb_eval_series,
    cheb_grid,
    coeffs_by_projection,
    coeffs_from_values,
    collocation_matrix,
    gauss_chebyshev_rule,
    integrate,
    integrate_rows,
    quadrature_rule,
)
from fiesolve.errors import DomainError, EvaluationError, InvalidIntervalError


class TestInterval:
    @pytest.mark.parametrize("a, b", [(1.0, 0.0), (0.0, 0.0), (0.0, math.inf), (math.nan, 1.0)])
    def test_invalid(self, a, b):
        with pytest.raises(InvalidIntervalError):
            Interval(a, b)

    @given(
        a=st.floats(-50, 50),
        width=st.floats(1e-3, 100),
        x=st.floats(-1, 1),
    )
    def test_affine_round_trip(self, a, width, x):
        iv = Interval(a, a + width)
        assert abs(iv.to_reference(iv.from_reference(x)) - x) <= 1e-14 * max(1.0, (abs(a) + width) / width)

    def test_maps_endpoints(self, unit):
        assert unit.from_reference(-1.0) == 0.0
        assert unit.from_reference(1.0) == 1.0


class TestChebEval:
    def test_constant(self):
        assert cheb_eval(0, 0.73) == 1.0

    def test_identity(self):
        assert cheb_eval(1, 0.73) == pytest.approx(0.73, abs=1e-15)

    def test_cubic_at_half(self):
        assert cheb_eval(3, 0.5) == pytest.approx(-1.0, abs=1e-15)

    @pytest.mark.parametrize("n, x", [(2, 1.5), (3, 2.0), (4, -1.7), (5, -3.0)])
    def test_hyperbolic_branches_match_polynomial(self, n, x):
        coeffs = np.zeros(n + 1)
        coeffs[n] = 1.0
        expected = np.polynomial.chebyshev.chebval(x, coeffs)
        assert cheb_eval(n, x) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=300)
    @given(n=st.integers(1, 29), x=st.floats(-1, 1))
    def test_three_term_recurrence(self, n, x):
        lhs = cheb_eval(n + 1, x)
        rhs = 2 * x * cheb_eval(n, x) - cheb_eval(n - 1, x)
        assert abs(lhs - rhs) <= 1e-12

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            cheb_eval(-1, 0.0)


class TestSeries:
    def test_constant_series(self, unit):
        approx = ChebApproximant(unit, [1.0, 0.0, 0.0])
        assert cheb_eval_series(approx, 0.37) == pytest.approx(1.0, abs=1e-15)

    def test_identity_series(self, ref):
        assert cheb_eval_series(ChebApproximant(ref, [0.0, 1.0]), 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_shifted_t2(self, unit):
        assert cheb_eval_series(ChebApproximant(unit, [0.0, 0.0, 1.0]), 0.75) == pytest.approx(-0.5, abs=1e-15)

    def test_vectorized_matches_direct_sum(self, unit):
        rng = np.random.default_rng(3)
        c = rng.normal(size=12)
        approx = ChebApproximant(unit, c)
        ts = np.linspace(0, 1, 57)
        direct = np.array([sum(ck * cheb_eval(k, 2 * t - 1) for k, ck in enumerate(c)) for t in ts])
        np.testing.assert_allclose(approx(ts), direct, atol=1e-13)

    def test_outside_interval(self, unit):
        with pytest.raises(DomainError):
            ChebApproximant(unit, [1.0, 2.0])(1.01)

    def test_coeffs_immutable(self, unit):
        approx = ChebApproximant(unit, [1.0, 2.0])
        with pytest.raises(ValueError):
            approx.coeffs[0] = 5.0


class TestGrid:
    def test_reference_grid(self, ref):
        grid = cheb_grid(2, ref)
        np.testing.assert_allclose(grid.reference_nodes, [1.0, 0.0, -1.0], atol=1e-16)
        np.testing.assert_allclose(grid.mapped_nodes, [1.0, 0.0, -1.0], atol=1e-16)

    def test_unit_grid(self, unit):
        np.testing.assert_allclose(cheb_grid(2, unit).mapped_nodes, [1.0, 0.5, 0.0], atol=1e-16)

    def test_mapped_node_closed_form(self, unit):
        t1 = cheb_grid(4, unit).mapped_nodes[1]
        assert t1 == pytest.approx((math.cos(math.pi / 4) + 1) / 2, abs=1e-15)
        assert t1 == pytest.approx(0.853553, abs=1e-6)

    def test_distinct_and_sized(self, unit):
        grid = cheb_grid(17, unit)
        assert len(grid.reference_nodes) == len(grid.mapped_nodes) == 18
        assert len(np.unique(grid.mapped_nodes)) == 18

    def test_zero_degree_rejected(self, unit):
        with pytest.raises(ValueError):
            cheb_grid(0, unit)


class TestQuadrature:
    def test_square(self, unit):
        assert integrate(lambda s: s**2, quadrature_rule(8, unit)) == pytest.approx(1 / 3, abs=1e-13)

    def test_constant(self, unit):
        assert integrate(lambda s: 1.0, quadrature_rule(8, unit)) == pytest.approx(1.0, abs=1e-15)

    def test_sine(self, unit):
        value = integrate(np.sin, quadrature_rule(10, unit))
        assert value == pytest.approx(1 - math.cos(1), abs=1e-10)
        assert value == pytest.approx(0.459697694, abs=1e-9)

    @pytest.mark.parametrize("N", [2, 3, 4, 7, 10, 16, 25, 40])
    @pytest.mark.parametrize("a, b", [(0.0, 1.0), (-2.0, 3.0), (1.5, 2.0)])
    def test_monomial_exactness(self, N, a, b):
        rule = quadrature_rule(N, Interval(a, b))
        assert math.fsum(rule.weights) == pytest.approx(b - a, rel=1e-12)
        for d in range(N):
            exact = (b ** (d + 1) - a ** (d + 1)) / (d + 1)
            got = integrate(lambda s: s**d, rule)
            assert got == pytest.approx(exact, rel=1e-12, abs=1e-12 * (abs(b) + abs(a)) ** (d + 1))

    def test_too_few_points(self, unit):
        with pytest.raises(ValueError):
            quadrature_rule(1, unit)

    def test_weights_finite_positive(self, unit):
        rule = quadrature_rule(41, unit)
        assert np.all(np.isfinite(rule.weights)) and np.all(rule.weights > 0)


class TestIntegrate:
    def test_zero(self, unit):
        assert integrate(lambda s: 0.0 * s, quadrature_rule(6, unit)) == 0.0

    def test_constant_on_0_2(self):
        assert integrate(lambda s: 3.0, quadrature_rule(5, Interval(0, 2))) == pytest.approx(6.0, abs=1e-14)

    def test_exponential(self, unit):
        got = integrate(lambda s: np.exp(-s - 1), quadrature_rule(12, unit))
        assert got == pytest.approx(math.exp(-1) - math.exp(-2), abs=1e-13)
        assert got == pytest.approx(0.232544158, abs=1e-9)

    def test_non_finite_reports_node(self, unit):
        with pytest.raises(EvaluationError) as info:
            integrate(lambda s: 1.0 / s, quadrature_rule(5, unit))
        assert info.value.node == {"s": 0.0}

    def test_rows_match_scalar_bits(self, unit):
        rule = quadrature_rule(13, unit)
        rows = np.array([np.sin(rule.nodes * k) for k in range(1, 5)])
        batched = integrate_rows(rows, rule)
        for k in range(1, 5):
            assert batched[k - 1] == integrate(lambda s: np.sin(s * k), rule)


class TestCollocation:
    def test_degree_one(self, ref):
        np.testing.assert_allclose(collocation_matrix(cheb_grid(1, ref)), [[1, 1], [1, -1]], atol=1e-15)

    def test_first_column_ones(self, unit):
        for M in (1, 5, 12):
            np.testing.assert_array_equal(collocation_matrix(cheb_grid(M, unit))[:, 0], 1.0)

    def test_middle_row(self, ref):
        np.testing.assert_allclose(collocation_matrix(cheb_grid(2, ref))[1], [1, 0, -1], atol=1e-15)

    def test_invertible(self, unit):
        T = collocation_matrix(cheb_grid(30, unit))
        assert np.linalg.cond(T) < 1e3

    def test_ones(self, unit):
        approx = coeffs_from_values(np.ones(7), cheb_grid(6, unit))
        np.testing.assert_allclose(approx.coeffs, [1, 0, 0, 0, 0, 0, 0], atol=1e-14)

    def test_identity_values(self, ref):
        grid = cheb_grid(5, ref)
        approx = coeffs_from_values(grid.mapped_nodes, grid)
        np.testing.assert_allclose(approx.coeffs, [0, 1, 0, 0, 0, 0], atol=1e-14)

    def test_sine_dense_deviation(self, unit):
        grid = cheb_grid(10, unit)
        approx = coeffs_from_values(np.sin(grid.mapped_nodes), grid)
        ts = np.linspace(0, 1, 1000)
        assert np.max(np.abs(approx(ts) - np.sin(ts))) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(M=st.integers(1, 40), seed=st.integers(0, 2**16))
    def test_round_trip(self, M, seed):
        grid = cheb_grid(M, Interval(-0.5, 2.0))
        values = np.random.default_rng(seed).normal(size=M + 1)
        approx = coeffs_from_values(values, grid)
        np.testing.assert_allclose(approx(grid.mapped_nodes), values, rtol=1e-10, atol=1e-10)

    def test_projection_agrees_on_smooth_input(self, unit):
        grid = cheb_grid(10, unit)
        interp = coeffs_from_values(np.exp(grid.mapped_nodes), grid)
        proj = coeffs_by_projection(np.exp, 10, unit)
        np.testing.assert_allclose(interp.coeffs, proj.coeffs, atol=1e-10)


class TestOrthogonality:
    @pytest.mark.parametrize("n", range(0, 12))
    @pytest.mark.parametrize("m", range(0, 12))
    def test_weighted_inner_products(self, n, m):
        x, w = gauss_chebyshev_rule(32)
        value = sum(wk * cheb_eval(n, xk) * cheb_eval(m, xk) for xk, wk in zip(x, w))
        expected = 0.0 if n != m else (math.pi if n == 0 else math.pi / 2)
        assert abs(value - expected) <= 1e-8
