"""Tiny arithmetic expression language used in problem configuration files.

Grammar (highest precedence last)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?              # right-associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Built-in functions take exactly one argument: sin, cos, tan, arctan, exp,
log (natural), sqrt, abs. Evaluation accepts scalars or numpy arrays as
bindings and broadcasts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from fiesolve.errors import (
    ExprDomainError,
    ExprSyntaxError,
    MissingBindingError,
    UnknownIdentifierError,
)

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "arctan": np.arctan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

_BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}

# precedence used by the printer to decide where parentheses are needed
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"
    offset: int = field(default=0, compare=False)


Node = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    encoded_offset = _byte_offsets(text)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", encoded_offset(bad), text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), encoded_offset(start)))
        pos = m.end()
    tokens.append(("end", "", encoded_offset(len(text))))
    return tokens


def _byte_offsets(text: str):
    if text.isascii():
        return lambda i: i
    return lambda i: len(text[:i].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, allowed_vars: Iterable[str]) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.allowed = frozenset(allowed_vars)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str) -> tuple[str, str, int]:
        kind, val, off = self.peek()
        if kind != "op" or val != value:
            shown = val if kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {shown!r}", off, self.text)
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off, self.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, off = self.take()
            node = BinOp(op, node, self.term(), off)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, off = self.take()
            node = BinOp(op, node, self.unary(), off)
        return node

    def unary(self) -> Node:
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary(), off)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary(), off)
        return base

    def atom(self) -> Node:
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val), off)
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise UnknownIdentifierError(val, off)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != 1:
                    raise ExprSyntaxError(
                        f"{val} takes exactly 1 argument ({len(args)} given)", off, self.text
                    )
                return Call(val, args[0], off)
            if val not in self.allowed:
                raise UnknownIdentifierError(val, off)
            return Var(val, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        shown = val if kind != "end" else "end of input"
        raise ExprSyntaxError(f"unexpected {shown!r}", off, self.text)


def parse(text: str, allowed_vars: Iterable[str]) -> Node:
    """Parse ``text`` into an AST whose variables are drawn from ``allowed_vars``.

    Raises
    ------
    ExprSyntaxError
        Malformed input; carries the byte offset.
    UnknownIdentifierError
        A name that is neither an allowed variable nor a built-in function.
    """
    return _Parser(text, allowed_vars).parse()


def to_source(node: Node) -> str:
    """Render an AST as text that parses back to an equal AST."""
    return _render(node)


def _render(node: Node, parent_prec: int = 0) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)})"
    if isinstance(node, Neg):
        inner = _render(node.operand, _PREC["neg"])
        text = f"-{inner}"
        return f"({text})" if parent_prec > _PREC["neg"] else text
    prec = _PREC[node.op]
    if node.op == "^":
        left = _render(node.left, prec + 1)
        right = _render(node.right, _PREC["neg"])
    else:
        left = _render(node.left, prec)
        right = _render(node.right, prec + 1)
    text = f"{left} {node.op} {right}"
    return f"({text})" if parent_prec > prec else text


def free_variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return free_variables(node.operand if isinstance(node, Neg) else node.arg)
    return free_variables(node.left) | free_variables(node.right)


def _first_bad(mask) -> int:
    mask = np.asarray(mask)
    return int(np.flatnonzero(mask)[0]) if mask.ndim else 0


def _fail(message: str, node: Node, mask) -> ExprDomainError:
    return ExprDomainError(message, subexpr=to_source(node), index=_first_bad(mask))


def evaluate(node: Node, bindings: Mapping[str, object]):
    """Evaluate ``node`` in IEEE double precision.

    Bindings may be floats or numpy arrays; results broadcast accordingly.
    Invalid operations (log or sqrt outside their domain, division by zero,
    negative base with a non-integer exponent, overflow) raise
    :class:`ExprDomainError` naming the offending sub-expression instead of
    producing NaN or infinity.
    """
    with np.errstate(all="ignore"):
        return _eval(node, bindings)


def _eval(node: Node, env: Mapping[str, object]):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise MissingBindingError(node.name) from None
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        arg = _eval(node.arg, env)
        if node.func == "log":
            bad = np.asarray(arg) <= 0
            if bad.any():
                raise _fail("log of non-positive argument", node, bad)
        elif node.func == "sqrt":
            bad = np.asarray(arg) < 0
            if bad.any():
                raise _fail("sqrt of negative argument", node, bad)
        out = FUNCTIONS[node.func](arg)
        bad = ~np.isfinite(out)
        if bad.any():
            raise _fail(f"{node.func} produced a non-finite value", node, bad)
        return out
    left = _eval(node.left, env)
    right = _eval(node.right, env)
    if node.op == "/":
        bad = np.asarray(right) == 0
        if bad.any():
            raise _fail("division by zero", node, np.broadcast_to(bad, np.broadcast(left, right).shape))
    elif node.op == "^":
        lb, rb = np.broadcast_arrays(np.asarray(left, dtype=float), np.asarray(right, dtype=float))
        bad = (lb < 0) & (rb != np.round(rb))
        if bad.any():
            raise _fail("negative base with non-integer exponent", node, bad)
    out = _BINARY[node.op](left, right)
    bad = ~np.isfinite(out)
    if bad.any():
        raise _fail(f"operator {node.op!r} produced a non-finite value", node, bad)
    return out


@dataclass(frozen=True, eq=False)
class ExprFunction:
    """Callable wrapper binding positional arguments to expression variables."""

    source: str
    variables: tuple[str, ...]
    ast: Node = field(repr=False)

    @classmethod
    def compile(cls, source: str, variables: Iterable[str]) -> "ExprFunction":
        variables = tuple(variables)
        return cls(source, variables, parse(source, variables))

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments, got {len(args)}")
        return evaluate(self.ast, dict(zip(self.variables, args)))
