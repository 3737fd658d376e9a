"""Numerical checks of the contraction hypotheses and error bounds.

The key quantities are

* ``M1(t) = (int_a^b |k(t, s)|^q ds)^(1/q)`` (the tight kernel bound),
* ``N = C (int_a^b M1(s)^p ds)^(1/p)`` with ``C = M L``; ``N < 1`` is the
  contraction condition,
* the Bielecki weight ``omega(x) = exp(lambda int_a^x M1^p)`` with
  ``1 < lambda < N^-p``, under which the operator contracts with factor
  ``lambda^(-1/p)``,
* the a priori bound ``N^n ||y_1||_p / (1 - N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from fiesolve.chebyshev import Interval, QuadratureRule, integrate, quadrature_rule
from fiesolve.errors import ContractionError, EvaluationError
from fiesolve.problem import HypothesisData, ProblemSpec


def lp_norm(fn: Callable, interval: Interval, p: float, rule: QuadratureRule) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    if rule.interval != interval:
        rule = rule.rescaled(interval)
    return integrate(lambda s: np.abs(fn(s)) ** p, rule) ** (1.0 / p)


def estimate_M1(spec: ProblemSpec, hyp: HypothesisData, t: float, rule: QuadratureRule) -> float:
    """Return ``(int_a^b |k(t, s)|^q ds)^(1/q)`` using ``rule``."""
    q = hyp.q
    return integrate(lambda s: np.abs(spec.k(t, s)) ** q, rule) ** (1.0 / q)


def M1_function(spec: ProblemSpec, hyp: HypothesisData, rule: QuadratureRule) -> Callable:
    """Vectorized ``t -> M1(t)``; integrals use ``rule`` in ascending node order."""
    q = hyp.q

    def M1(t):
        t_arr = np.asarray(t, dtype=float)
        flat = t_arr.reshape(-1)
        kv = np.abs(spec.k(flat[:, None], rule.nodes[None, :])) ** q
        acc = np.zeros(flat.shape)
        for j, w in enumerate(rule.weights.tolist()):
            acc = acc + w * kv[:, j]
        out = (acc ** (1.0 / q)).reshape(t_arr.shape)
        return float(out) if out.ndim == 0 else out

    return M1


def default_lambda(N: float, p: float) -> float:
    """Midpoint ``(1 + N^-p) / 2`` of the admissible range ``1 < lambda < N^-p``."""
    if N <= 0:
        return math.inf
    return (1.0 + N ** (-p)) / 2.0


@dataclass(frozen=True, eq=False)
class ContractionReport:
    N: float
    p: float
    is_contraction: bool
    M1_samples: list[tuple[float, float]]
    lambda_max: float

    def alpha_for_lambda(self, lam: float) -> float:
        """Contraction factor ``lambda^(-1/p)`` in the weighted norm."""
        return lam ** (-1.0 / self.p)

    @property
    def default_lambda(self) -> float:
        return default_lambda(self.N, self.p)

    def as_dict(self) -> dict:
        lam = self.default_lambda if self.is_contraction else None
        return {
            "N": self.N,
            "p": self.p,
            "is_contraction": self.is_contraction,
            "lambda_min": 1.0,
            "lambda_max": self.lambda_max,
            "default_lambda": lam,
            "alpha_at_default_lambda": self.alpha_for_lambda(lam) if lam is not None else None,
            "M1_samples": [list(pair) for pair in self.M1_samples],
        }


def contraction_constant(
    spec: ProblemSpec,
    hyp: HypothesisData,
    outer_rule: QuadratureRule,
    inner_rule: QuadratureRule,
) -> ContractionReport:
    """Compute ``N = C (int [M1(s)]^p ds)^(1/p)``.

    ``M1`` is evaluated at the nodes of ``outer_rule`` with integrals along
    ``s`` done by ``inner_rule``.
    """
    M1 = M1_function(spec, hyp, inner_rule)
    m1_nodes = np.atleast_1d(M1(outer_rule.nodes))
    acc = 0.0
    for w, v in zip(outer_rule.weights.tolist(), (m1_nodes ** hyp.p).tolist()):
        acc += w * v
    N = hyp.C * acc ** (1.0 / hyp.p)
    if not math.isfinite(N):
        raise EvaluationError("contraction constant is not finite", function="k")
    lam_max = N ** (-hyp.p) if N > 0 else math.inf
    samples = [(float(t), float(m)) for t, m in zip(outer_rule.nodes, m1_nodes)]
    samples.sort()
    return ContractionReport(N, hyp.p, N < 1.0, samples, lam_max)


def bielecki_norm(
    fn: Callable,
    interval: Interval,
    p: float,
    lam: float,
    M1_fn: Callable,
    rule: QuadratureRule,
) -> float:
    """Weighted norm ``(sup_x omega(x)^-1 int_a^x |fn|^p)^(1/p)``.

    The supremum is taken over the nodes of ``rule`` (strictly inside or at
    ``b``) plus the endpoint ``b``; partial integrals over ``[a, x]`` reuse
    ``rule`` transplanted onto that sub-interval.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    vals, _ = _partial_integrals(
        interval, rule, [lambda s: np.abs(fn(s)) ** p, lambda s: np.abs(M1_fn(s)) ** p]
    )
    ratios = vals[0] * np.exp(-lam * vals[1])
    return float(np.max(ratios)) ** (1.0 / p)


def _sample_points(interval: Interval, rule: QuadratureRule) -> np.ndarray:
    xs = np.unique(np.append(rule.nodes, interval.b))
    return xs[xs > interval.a]


def _partial_integrals(interval: Interval, rule: QuadratureRule, integrands):
    """``int_a^x h`` for each integrand ``h`` and each sample point ``x``.

    Returns an array of shape ``(len(integrands), n_samples)`` and the sample
    points.
    """
    if rule.interval != interval:
        rule = rule.rescaled(interval)
    xs = _sample_points(interval, rule)
    ref = interval.to_reference(rule.nodes)
    # nodes of the rule transplanted onto [a, x] for every x, shape (n_x, N)
    half = (xs - interval.a)[:, None] / 2.0
    sub_nodes = interval.a + half * (ref[None, :] + 1.0)
    sub_weights = rule.weights[None, :] * (xs - interval.a)[:, None] / interval.length
    out = np.empty((len(integrands), xs.size))
    for i, h in enumerate(integrands):
        with np.errstate(all="ignore"):
            vals = np.broadcast_to(np.asarray(h(sub_nodes), dtype=float), sub_nodes.shape)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("non-finite integrand in partial integral")
        acc = np.zeros(xs.size)
        for j in range(rule.point_count_N):
            acc = acc + sub_weights[:, j] * vals[:, j]
        out[i] = acc
    return out, xs


def omega_function(lam: float, M1_fn: Callable, p: float, interval: Interval, rule: QuadratureRule):
    """Return sample points ``x`` and ``omega(x) = exp(lambda int_a^x M1^p)``, including ``x = a``."""
    vals, xs = _partial_integrals(interval, rule, [lambda s: np.abs(M1_fn(s)) ** p])
    xs = np.insert(xs, 0, interval.a)
    omega = np.exp(lam * np.insert(vals[0], 0, 0.0))
    return xs, omega


def equivalence_constants(
    interval: Interval,
    p: float,
    lam: float,
    M1_fn: Callable,
    rule: Optional[QuadratureRule] = None,
) -> tuple[float, float]:
    """Constants with ``c1 ||u||_p <= ||u||_{p,omega} <= c2 ||u||_p``.

    ``c1 = (sup omega)^(-1/p)`` and ``c2 = (inf omega)^(-1/p)`` over the
    sample points of ``rule`` (default: 41-point Clenshaw-Curtis) and both
    endpoints.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    rule = rule if rule is not None else quadrature_rule(41, interval)
    _, omega = omega_function(lam, M1_fn, p, interval, rule)
    return float(np.max(omega)) ** (-1.0 / p), float(np.min(omega)) ** (-1.0 / p)


def apriori_bound(N: float, y1_norm: float, n: int) -> float:
    """``N^n ||y_1||_p / (1 - N)``, the bound on ``||y* - y_n||_p``."""
    if not N < 1:
        raise ContractionError(f"a priori bound requires N < 1, got N = {N}")
    if N < 0 or n < 0 or y1_norm < 0:
        raise ValueError("N, n and y1_norm must be non-negative")
    return N ** n * y1_norm / (1.0 - N)


def growth_excess_g(spec: ProblemSpec, hyp: HypothesisData, s, y) -> float:
    """Largest ``|g(s, y)| - (a0(s) + b0 |y|)`` over the given points; <= 0 means the bound holds."""
    if hyp.a3_a0 is None or hyp.a3_b0 is None:
        raise ValueError("hypothesis data has no growth bound for g")
    s, y = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(y, dtype=float))
    bound = np.asarray(hyp.a3_a0(s), dtype=float) + hyp.a3_b0 * np.abs(y)
    return float(np.max(np.abs(spec.g(s, y)) - bound))


def growth_excess_f(spec: ProblemSpec, hyp: HypothesisData, t, x) -> float:
    """Largest ``|f(t, x)| - (h1(t) + b1 |x|^(q/p))`` over the given points."""
    if hyp.a1_h1 is None or hyp.a1_b1 is None:
        raise ValueError("hypothesis data has no growth bound for f")
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    bound = np.asarray(hyp.a1_h1(t), dtype=float) + hyp.a1_b1 * np.abs(x) ** (hyp.q / hyp.p)
    return float(np.max(np.abs(spec.f(t, x)) - bound))


def local_lipschitz_f(spec: ProblemSpec, t, z_center, radius: float, samples: int = 201) -> float:
    """Largest difference quotient of ``f(t, .)`` over ``[z - radius, z + radius]``.

    A numerical probe for documenting effective Lipschitz constants near a
    known solution; not a proof of a bound.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    zc = np.broadcast_to(np.asarray(z_center, dtype=float), t.shape)
    offsets = np.linspace(-radius, radius, samples)
    zz = zc[:, None] + offsets[None, :]
    vals = spec.f(np.broadcast_to(t[:, None], zz.shape), zz)
    return float(np.max(np.abs(np.diff(vals, axis=1)) / np.diff(offsets)))
