"""Chebyshev basis, Chebyshev-Lobatto grids, quadrature and interpolation on [a, b].

Everything here works on an arbitrary finite interval through the affine map

    x = (2 t - (a + b)) / (b - a),      t = ((b - a) x + (a + b)) / 2

between the physical variable ``t`` and the reference variable ``x`` in [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from fiesolve.errors import (
    DomainError,
    EvaluationError,
    InvalidIntervalError,
    SingularSystemError,
)

# Slack allowed when checking that a point lies in [a, b]; covers rounding in
# the affine map at the endpoints.
_DOMAIN_SLACK = 1e-13


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidIntervalError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise InvalidIntervalError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def to_reference(self, t):
        """Map physical points ``t`` in [a, b] to reference points in [-1, 1]."""
        return (2.0 * np.asarray(t, dtype=float) - (self.a + self.b)) / (self.b - self.a)

    def from_reference(self, x):
        """Map reference points ``x`` in [-1, 1] to physical points in [a, b]."""
        return ((self.b - self.a) * np.asarray(x, dtype=float) + (self.a + self.b)) / 2.0

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        slack = _DOMAIN_SLACK * self.length
        return bool(np.all((t >= self.a - slack) & (t <= self.b + slack)))


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """Chebyshev-Lobatto collocation grid ``x_i = cos(i pi / M)``, i = 0..M."""

    degree_M: int
    interval: Interval
    reference_nodes: np.ndarray
    mapped_nodes: np.ndarray

    def __len__(self) -> int:
        return self.degree_M + 1


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights of an interpolatory rule for plain ``ds`` integrals."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: Interval

    @property
    def point_count_N(self) -> int:
        return len(self.nodes)

    def rescaled(self, interval: Interval) -> "QuadratureRule":
        """Return the same rule transplanted affinely onto ``interval``."""
        x = self.interval.to_reference(self.nodes)
        scale = interval.length / self.interval.length
        return QuadratureRule(
            _frozen(interval.from_reference(x)), _frozen(self.weights * scale), interval
        )


@dataclass(frozen=True, eq=False)
class ChebApproximant:
    """Finite Chebyshev series ``sum_n c_n T_n(x(t))`` on an interval.

    Instances are callable on scalars or arrays of points in the interval.
    """

    interval: Interval
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t):
        return cheb_eval_series(self, t)

    @classmethod
    def zero(cls, degree: int, interval: Interval) -> "ChebApproximant":
        return cls(interval, np.zeros(degree + 1))


def cheb_eval(n: int, x: float) -> float:
    """Evaluate the Chebyshev polynomial T_n at a real point by its closed form.

    Uses ``cos(n arccos x)`` inside [-1, 1] and the hyperbolic continuations
    ``cosh(n arcosh x)`` for x >= 1 and ``(-1)^n cosh(n arcosh(-x))`` for
    x <= -1.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = float(x)
    if abs(x) <= 1.0:
        return math.cos(n * math.acos(x))
    if x > 1.0:
        return math.cosh(n * math.acosh(x))
    return (-1.0) ** n * math.cosh(n * math.acosh(-x))


def _cheb_cos_table(degree: int, x: np.ndarray) -> np.ndarray:
    """Matrix of T_j(x_i) for reference points |x_i| <= 1 (cosine branch)."""
    theta = np.arccos(np.clip(x, -1.0, 1.0))
    return np.cos(np.outer(theta, np.arange(degree + 1)))


def cheb_eval_series(approx: ChebApproximant, t):
    """Evaluate a Chebyshev series at physical point(s) ``t`` by Clenshaw's recurrence.

    Raises
    ------
    DomainError
        If any point lies outside ``approx.interval``.
    """
    t_arr = np.asarray(t, dtype=float)
    if not approx.interval.contains(t_arr):
        raise DomainError(
            f"point(s) outside [{approx.interval.a}, {approx.interval.b}]"
        )
    x = np.clip(approx.interval.to_reference(t_arr), -1.0, 1.0)
    c = approx.coeffs
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + ck, b1
    y = x * b1 - b2 + c[0]
    return float(y) if y.ndim == 0 else y


def cheb_grid(M: int, interval: Interval) -> ChebGrid:
    """Chebyshev-Lobatto points ``cos(i pi / M)`` and their images in [a, b]."""
    if M < 1:
        raise ValueError("a distinct multi-node grid requires M >= 1")
    x = np.cos(np.pi * np.arange(M + 1) / M)
    return ChebGrid(M, interval, _frozen(x), _frozen(interval.from_reference(x)))


def _clenshaw_curtis_reference(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    n = n_points - 1
    theta = np.pi * np.arange(n_points) / n
    x = np.cos(theta)
    j = np.arange(1, n // 2 + 1)
    bj = np.where(2 * j == n, 1.0, 2.0)
    s = (bj / (4.0 * j * j - 1.0) * np.cos(2.0 * np.outer(theta, j))).sum(axis=1)
    ck = np.full(n_points, 2.0)
    ck[0] = ck[-1] = 1.0
    return x, ck / n * (1.0 - s)


def quadrature_rule(N: int, interval: Interval) -> QuadratureRule:
    """Clenshaw-Curtis rule on ``N`` Chebyshev-Lobatto points mapped to [a, b].

    Integrates every polynomial of degree <= N - 1 exactly (and degree N when
    N is odd).
    """
    if N < 2:
        raise ValueError("quadrature needs at least N = 2 points")
    x, w = _clenshaw_curtis_reference(N)
    return QuadratureRule(
        _frozen(interval.from_reference(x)), _frozen(w * interval.length / 2.0), interval
    )


def gauss_chebyshev_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integrals of ``h(x) / sqrt(1 - x^2)`` over [-1, 1].

    Exact for polynomial ``h`` of degree <= 2n - 1. Only used for the
    orthogonality check and the projection cross-check; the solver never
    integrates against this weight.
    """
    if n < 1:
        raise ValueError("n must be positive")
    k = np.arange(1, n + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * n)), np.full(n, np.pi / n)


def _check_finite(values: np.ndarray, nodes: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            "integrand is not finite", node={"s": float(nodes[idx])}, index=idx
        )


def integrate(fn: Callable, rule: QuadratureRule) -> float:
    """Apply ``rule`` to ``fn``; ``fn`` is called once on the array of nodes.

    The weighted sum is accumulated in ascending node order so that results
    are bit-reproducible.
    """
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(fn(rule.nodes), dtype=float), rule.nodes.shape)
    _check_finite(values, rule.nodes)
    acc = 0.0
    for w, v in zip(rule.weights.tolist(), values.tolist()):
        acc += w * v
    return acc


def integrate_rows(values: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Integrate each row of ``values`` (shape ``(m, N)``) against ``rule``.

    Rows are processed together; along each row the sum runs in ascending
    node order, matching :func:`integrate` bit for bit.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != rule.point_count_N:
        raise ValueError("last axis must match the number of quadrature nodes")
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise EvaluationError(
            "integrand is not finite",
            node={"s": float(rule.nodes[col])},
            index=int(row),
        )
    acc = np.zeros(values.shape[:-1])
    for j, w in enumerate(rule.weights.tolist()):
        acc = acc + w * values[..., j]
    return acc


def collocation_matrix(grid: ChebGrid) -> np.ndarray:
    """Matrix with entries ``T_j(x_i)`` at the grid's reference nodes."""
    return _cheb_cos_table(grid.degree_M, grid.reference_nodes)


@dataclass(frozen=True, eq=False)
class CollocationSolver:
    """LU factorization of a grid's collocation matrix, reusable across solves."""

    grid: ChebGrid
    lu: tuple = field(repr=False)

    @classmethod
    def for_grid(cls, grid: ChebGrid) -> "CollocationSolver":
        T = collocation_matrix(grid)
        try:
            lu = scipy.linalg.lu_factor(T, check_finite=True)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SingularSystemError(f"collocation matrix factorization failed: {exc}") from exc
        if np.any(np.diag(lu[0]) == 0.0):
            raise SingularSystemError("collocation matrix is singular")
        return cls(grid, lu)

    def coefficients(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.grid),):
            raise ValueError(f"expected {len(self.grid)} values, got shape {values.shape}")
        return scipy.linalg.lu_solve(self.lu, values, check_finite=False)


def coeffs_from_values(values: Sequence[float], grid: ChebGrid) -> ChebApproximant:
    """Interpolate values at the grid's mapped nodes by solving ``T c = values``."""
    c = CollocationSolver.for_grid(grid).coefficients(values)
    return ChebApproximant(grid.interval, c)


def coeffs_by_projection(
    fn: Callable, degree: int, interval: Interval, n_points: int = 64
) -> ChebApproximant:
    """Truncated Chebyshev expansion from the weighted inner-product formula.

    ``c_n = 2 / (pi d_n) * int T_n(x) fn(t(x)) / sqrt(1 - x^2) dx`` with
    ``d_0 = 2`` and ``d_n = 1`` otherwise, evaluated by Gauss-Chebyshev
    quadrature. Cross-check for :func:`coeffs_from_values` on smooth inputs.
    """
    x, w = gauss_chebyshev_rule(n_points)
    fx = np.asarray(fn(interval.from_reference(x)), dtype=float)
    table = _cheb_cos_table(degree, x)
    d = np.ones(degree + 1)
    d[0] = 2.0
    c = 2.0 / (np.pi * d) * ((w * fx) @ table)
    return ChebApproximant(interval, c)
