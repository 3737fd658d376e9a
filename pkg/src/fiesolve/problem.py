"""Problem data for ``y(t) = f(t, int_a^b k(t, s) g(s, y(s)) ds)``.

Problem functions are vectorized: they receive numpy arrays (or floats) and
must broadcast. Every call made by the library goes through
:meth:`ProblemSpec.k`, :meth:`ProblemSpec.f`, :meth:`ProblemSpec.g` or
:meth:`ProblemSpec.exact`, which turn NaN/inf results and expression domain
faults into :class:`~fiesolve.errors.EvaluationError` carrying the failing
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from fiesolve.chebyshev import Interval, QuadratureRule, integrate_rows
from fiesolve.errors import ConfigError, EvaluationError, ExprError, MissingKeyError
from fiesolve.expr import ExprFunction

Fn = Callable[..., object]


def _checked(name: str, fn: Fn, argnames: tuple[str, ...], *args):
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    shape = arrays[0].shape

    def node_at(index: Optional[int]) -> dict:
        i = 0 if index is None or not shape else index
        return {n: float(a.reshape(-1)[i]) for n, a in zip(argnames, arrays)}

    try:
        with np.errstate(all="ignore"):
            out = fn(*args)
    except EvaluationError as exc:
        raise EvaluationError(
            exc.message, function=name, node=node_at(exc.index), subexpr=exc.subexpr
        ) from exc
    out = np.broadcast_to(np.asarray(out, dtype=float), shape)
    bad = ~np.isfinite(out)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0]) if shape else None
        raise EvaluationError("non-finite value", function=name, node=node_at(idx))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    interval: Interval
    kernel_k: Fn
    outer_f: Fn
    inner_g: Fn
    exact_solution: Optional[Fn] = None
    name: str = "problem"

    def k(self, t, s):
        return _checked("k", self.kernel_k, ("t", "s"), t, s)

    def f(self, t, z):
        return _checked("f", self.outer_f, ("t", "z"), t, z)

    def g(self, s, y):
        return _checked("g", self.inner_g, ("s", "y"), s, y)

    def exact(self, t):
        if self.exact_solution is None:
            raise ValueError(f"problem {self.name!r} has no exact solution")
        return _checked("exact", self.exact_solution, ("t",), t)

    @property
    def has_exact(self) -> bool:
        return self.exact_solution is not None


@dataclass(frozen=True, eq=False)
class HypothesisData:
    """Constants entering the existence/uniqueness hypotheses.

    ``lipschitz_M`` bounds ``|f(t, x1) - f(t, x2)| / |x1 - x2|`` and
    ``lipschitz_L`` does the same for ``g``; ``C = M * L``. The optional growth
    data describe ``|f(t, x)| <= h1(t) + b1 |x|^(q/p)`` and
    ``|g(s, z)| <= a0(s) + b0 |z|``. All of these are user-asserted inputs.
    """

    p: float
    lipschitz_M: float
    lipschitz_L: float
    a1_h1: Optional[Fn] = None
    a1_b1: Optional[float] = None
    a3_a0: Optional[Fn] = None
    a3_b0: Optional[float] = None
    q: float = field(init=False)
    C: float = field(init=False)

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (1.0 < p < math.inf):
            raise ValueError(f"p must lie in (1, inf), got {p}")
        for label in ("lipschitz_M", "lipschitz_L", "a1_b1", "a3_b0"):
            value = getattr(self, label)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{label} must be a finite non-negative number, got {value}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", p / (p - 1.0))
        object.__setattr__(self, "C", float(self.lipschitz_M) * float(self.lipschitz_L))


def operator_values(spec: ProblemSpec, y_at_nodes, rule: QuadratureRule, ts) -> np.ndarray:
    """``(A y)(t)`` for each ``t`` in ``ts``, given ``y`` sampled at the rule nodes."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    flat = ts.reshape(-1)
    gvals = spec.g(rule.nodes, y_at_nodes)
    kvals = spec.k(flat[:, None], rule.nodes[None, :])
    z = integrate_rows(kvals * gvals, rule)
    return np.asarray(spec.f(flat, z), dtype=float).reshape(ts.shape)


def apply_operator(spec: ProblemSpec, y: Fn, rule: QuadratureRule, t):
    """Evaluate ``f(t, int k(t, s) g(s, y(s)) ds)`` with the integral done by ``rule``."""
    out = operator_values(spec, y(rule.nodes), rule, t)
    return float(out[0]) if np.ndim(t) == 0 else out


def operator_function(spec: ProblemSpec, y: Fn, rule: QuadratureRule) -> Callable:
    """Return ``A y`` as a vectorized callable of ``t``."""
    y_nodes = np.asarray(y(rule.nodes), dtype=float)

    def Ay(t):
        out = operator_values(spec, y_nodes, rule, t)
        return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))

    return Ay


# Built-in examples. These are native numpy callbacks; the operation order
# mirrors the config-file expressions in examples/ so both give identical bits.

def _ex1_f(t, z):
    return np.sin(z + (t - 1.0) * np.cos(1.0) + np.sin(1.0))


def _ex2_f(t, z):
    return np.log(z - t / 3.0 + np.exp(-t - 1.0)) / (t + 1.0) + np.tan(t) + 1.0


# sup_t |df/dz| at the exact solution z*(t) = t/3 for example 2:
# df/dz = e^(t+1)/(t+1), increasing on [0, 1], so the sup is e^2/2.
EXAMPLE2_LOCAL_M = math.exp(2.0) / 2.0


def builtin_example(id: int) -> tuple[ProblemSpec, HypothesisData]:
    """Return one of the two built-in test problems on [0, 1].

    1. ``y = sin(int_0^1 (t - s) y(s) ds + (t - 1) cos 1 + sin 1)``, exact ``sin t``.
    2. ``y = log(int_0^1 t s arctan(y(s)) ds - t/3 + e^(-t-1)) / (t + 1) + tan t + 1``,
       exact ``tan t``.

    Example 2's ``f`` has no global Lipschitz constant (its log argument can
    approach zero); ``lipschitz_M`` is the local value ``e^2 / 2`` at the
    exact solution.
    """
    unit = Interval(0.0, 1.0)
    if id == 1:
        spec = ProblemSpec(
            unit,
            kernel_k=lambda t, s: t - s,
            outer_f=_ex1_f,
            inner_g=lambda s, y: y,
            exact_solution=np.sin,
            name="example1",
        )
        hyp = HypothesisData(
            p=2.0,
            lipschitz_M=1.0,
            lipschitz_L=1.0,
            a1_h1=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            a1_b1=0.0,
            a3_a0=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            a3_b0=1.0,
        )
        return spec, hyp
    if id == 2:
        spec = ProblemSpec(
            unit,
            kernel_k=lambda t, s: t * s,
            outer_f=_ex2_f,
            inner_g=lambda s, y: np.arctan(y),
            exact_solution=np.tan,
            name="example2",
        )
        hyp = HypothesisData(
            p=2.0,
            lipschitz_M=EXAMPLE2_LOCAL_M,
            lipschitz_L=1.0,
            a3_a0=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            a3_b0=1.0,
        )
        return spec, hyp
    raise ValueError(f"unknown built-in example {id!r}; expected 1 or 2")


_EXPR_KEYS = {
    "kernel": ("t", "s"),
    "f": ("t", "z"),
    "g": ("s", "y"),
    "exact": ("t",),
    "a1_h1": ("t",),
    "a3_a0": ("s",),
}
_NUMBER_KEYS = {"a", "b", "p", "lipschitz_M", "lipschitz_L", "a1_b1", "a3_b0"}
_MANDATORY = ("a", "b", "kernel", "f", "g")


def _parse_lines(config_text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(config_text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in _EXPR_KEYS and key not in _NUMBER_KEYS and key != "name":
            raise ConfigError(f"line {lineno}: unknown key", key)
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key", key)
        entries[key] = value
    return entries


def load_problem(config_text: str) -> tuple[ProblemSpec, Optional[HypothesisData]]:
    """Build a problem from ``key = value`` configuration text.

    Mandatory keys: ``a``, ``b``, ``kernel`` (in t, s), ``f`` (in t, z) and
    ``g`` (in s, y). Optional: ``name``, ``exact`` (in t), ``p`` (default 2),
    ``lipschitz_M``, ``lipschitz_L``, and the growth data ``a1_h1``,
    ``a1_b1``, ``a3_a0``, ``a3_b0``. Hypothesis data is returned only when
    both Lipschitz constants are present, otherwise ``None``.
    """
    entries = _parse_lines(config_text)
    for key in _MANDATORY:
        if key not in entries:
            raise MissingKeyError(key)

    numbers: dict[str, float] = {}
    for key in _NUMBER_KEYS & entries.keys():
        try:
            numbers[key] = float(entries[key])
        except ValueError:
            raise ConfigError(f"not a number: {entries[key]!r}", key) from None

    funcs: dict[str, ExprFunction] = {}
    for key in _EXPR_KEYS.keys() & entries.keys():
        try:
            funcs[key] = ExprFunction.compile(entries[key], _EXPR_KEYS[key])
        except ExprError as exc:
            raise ConfigError(str(exc), key) from exc

    spec = ProblemSpec(
        Interval(numbers["a"], numbers["b"]),
        kernel_k=funcs["kernel"],
        outer_f=funcs["f"],
        inner_g=funcs["g"],
        exact_solution=funcs.get("exact"),
        name=entries.get("name", "problem"),
    )

    if "lipschitz_M" in numbers and "lipschitz_L" in numbers:
        try:
            hyp = HypothesisData(
                p=numbers.get("p", 2.0),
                lipschitz_M=numbers["lipschitz_M"],
                lipschitz_L=numbers["lipschitz_L"],
                a1_h1=funcs.get("a1_h1"),
                a1_b1=numbers.get("a1_b1"),
                a3_a0=funcs.get("a3_a0"),
                a3_b0=numbers.get("a3_b0"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return spec, hyp
    return spec, None
