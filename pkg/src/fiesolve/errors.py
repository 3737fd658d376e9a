"""Exception hierarchy shared by every fiesolve module."""

from __future__ import annotations

from typing import Mapping, Optional


class FieError(Exception):
    """Base class for all errors raised by fiesolve."""


class InvalidIntervalError(FieError, ValueError):
    """Interval endpoints are non-finite or not strictly increasing."""


class DomainError(FieError, ValueError):
    """A point lies outside the interval an object is defined on."""


class EvaluationError(FieError, ArithmeticError):
    """A problem function produced an invalid (non-finite or undefined) value.

    Attributes
    ----------
    function : str or None
        Which problem function failed (``"k"``, ``"f"``, ``"g"``, ``"exact"``).
    node : mapping or None
        Argument values at the first failing evaluation point.
    subexpr : str or None
        Source text of the failing sub-expression, for expression-backed
        functions.
    index : int or None
        Flat index of the first failing element in a vectorized evaluation.
    """

    def __init__(
        self,
        message: str,
        *,
        function: Optional[str] = None,
        node: Optional[Mapping[str, float]] = None,
        subexpr: Optional[str] = None,
        index: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.function = function
        self.node = dict(node) if node is not None else None
        self.subexpr = subexpr
        self.index = index

    def __str__(self) -> str:
        parts = [self.message]
        if self.function is not None:
            parts.append(f"in {self.function}")
        if self.node:
            coords = ", ".join(f"{k}={v!r}" for k, v in self.node.items())
            parts.append(f"at ({coords})")
        if self.subexpr is not None:
            parts.append(f"[sub-expression: {self.subexpr}]")
        return " ".join(parts)


class ExprError(FieError, ValueError):
    """Base class for expression parsing and binding errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int, text: str = "") -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class UnknownIdentifierError(ExprError):
    """An identifier is neither a declared variable nor a built-in function."""

    def __init__(self, name: str, offset: int) -> None:
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class MissingBindingError(ExprError, KeyError):
    def __init__(self, name: str) -> None:
        ExprError.__init__(self, f"no binding for variable {name!r}")
        self.name = name

    __str__ = ExprError.__str__


class ExprDomainError(EvaluationError):
    """Raised by the expression evaluator for log/sqrt/pow/division faults."""


class ConfigError(FieError, ValueError):
    """Problem configuration could not be interpreted."""

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class MissingKeyError(ConfigError):
    def __init__(self, key: str) -> None:
        super().__init__("missing mandatory key", key)


class ContractionError(FieError, ValueError):
    """The contraction hypothesis N < 1 is violated."""


class SingularSystemError(FieError, RuntimeError):
    """The collocation matrix could not be factored; indicates a bug."""

