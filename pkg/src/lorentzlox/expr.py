"""A tiny expression language for profile-curve components.

Grammar (``^`` binds tighter than unary minus, exponents are integers)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" exponent)?
    exponent:= ["-"] INTEGER | "(" ["-"] INTEGER ")"
    atom    := NUMBER | "u" | NAME | FUNC "(" expr ")" | "(" expr ")"

``FUNC`` is one of sin, cos, sinh, cosh, exp, log, sqrt. ``NAME`` must be a
declared constant (or the builtin ``pi``). Expressions are evaluated with
forward-mode dual numbers, so every evaluation yields the value and the exact
first derivative with respect to ``u``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt")
BUILTIN_CONSTANTS = {"pi": math.pi}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, source: str, pos: int):
        super().__init__(f"{message} at position {pos}: {source!r}")
        self.source = source
        self.pos = pos


class UnknownIdentifierError(ExprSyntaxError):
    pass


class DomainError(ArithmeticError):
    """Evaluation left the domain of log, sqrt or division."""


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Param, Neg, BinOp, Pow, Call]


# --- parser ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, constants):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.constants = constants

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.take()
        if value != text or kind == "end":
            found = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", self.source, pos)

    def parse(self) -> Expr:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {value!r}", self.source, pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = self.peek()[:2] == ("op", "(")
        if paren:
            self.take()
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        kind, value, pos = self.take()
        if kind != "num" or not value.isdigit():
            raise ExprSyntaxError("exponent must be an integer literal", self.source, pos)
        if paren:
            self.expect(")")
        return sign * int(value)

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value == "u":
                return Var()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in self.constants or value in BUILTIN_CONSTANTS:
                return Param(value)
            raise UnknownIdentifierError(f"unknown identifier {value!r}", self.source, pos)
        if (kind, value) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {found}", self.source, pos)


def parse(source: str, constants: Mapping[str, float] | None = None) -> Expr:
    """Parse ``source`` into an expression tree.

    Identifiers other than ``u``, the function names and ``pi`` must appear
    in ``constants``; their values are bound at evaluation time.
    """
    return _Parser(source, constants or {}).parse()


def to_source(e: Expr) -> str:
    """Render an expression back to parseable text (fully parenthesised)."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "u"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"({to_source(e.base)})^{exp}"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def params_used(e: Expr) -> set[str]:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Neg):
        return params_used(e.operand)
    if isinstance(e, BinOp):
        return params_used(e.left) | params_used(e.right)
    if isinstance(e, Pow):
        return params_used(e.base)
    if isinstance(e, Call):
        return params_used(e.arg)
    return set()


def depends_on_u(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Neg):
        return depends_on_u(e.operand)
    if isinstance(e, BinOp):
        return depends_on_u(e.left) or depends_on_u(e.right)
    if isinstance(e, Pow):
        return depends_on_u(e.base)
    if isinstance(e, Call):
        return depends_on_u(e.arg)
    return False


# --- dual numbers ----------------------------------------------------------

@dataclass(frozen=True)
class DualNumber:
    value: float
    deriv: float = 0.0

    def __add__(self, other):
        other = _lift(other)
        return DualNumber(self.value + other.value, self.deriv + other.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        return DualNumber(self.value - other.value, self.deriv - other.deriv)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return DualNumber(self.value * other.value,
                          self.deriv * other.value + self.value * other.deriv)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other.value == 0.0:
            raise DomainError("division by zero")
        q = self.value / other.value
        return DualNumber(q, (self.deriv - q * other.deriv) / other.value)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __neg__(self):
        return DualNumber(-self.value, -self.deriv)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k == 0:
            return DualNumber(1.0, 0.0)
        if k < 0:
            if self.value == 0.0:
                raise DomainError("zero raised to a negative power")
            return DualNumber(1.0, 0.0) / self ** (-k)
        return DualNumber(self.value ** k, k * self.value ** (k - 1) * self.deriv)


def _lift(x) -> DualNumber:
    return x if isinstance(x, DualNumber) else DualNumber(float(x), 0.0)


def _apply(func: str, a: DualNumber) -> DualNumber:
    x, dx = a.value, a.deriv
    if func == "sin":
        return DualNumber(math.sin(x), math.cos(x) * dx)
    if func == "cos":
        return DualNumber(math.cos(x), -math.sin(x) * dx)
    if func == "sinh":
        return DualNumber(math.sinh(x), math.cosh(x) * dx)
    if func == "cosh":
        return DualNumber(math.cosh(x), math.sinh(x) * dx)
    if func == "exp":
        ex = math.exp(x)
        return DualNumber(ex, ex * dx)
    if func == "log":
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r}")
        return DualNumber(math.log(x), dx / x)
    if func == "sqrt":
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x!r}")
        r = math.sqrt(x)
        if r == 0.0:
            raise DomainError("sqrt has no finite derivative at 0")
        return DualNumber(r, dx / (2.0 * r))
    raise ValueError(f"unknown function {func!r}")


def _constant(name: str, constants: Mapping[str, float]) -> float:
    if name in constants:
        return float(constants[name])
    if name in BUILTIN_CONSTANTS:
        return BUILTIN_CONSTANTS[name]
    raise UnknownIdentifierError(f"unbound constant {name!r}", name, 0)


def eval_dual(e: Expr, u: float, constants: Mapping[str, float] | None = None) -> DualNumber:
    """Evaluate ``e`` at ``u``, returning value and d/du as a :class:`DualNumber`."""
    constants = constants or {}

    def ev(node) -> DualNumber:
        if isinstance(node, Num):
            return DualNumber(node.value, 0.0)
        if isinstance(node, Var):
            return DualNumber(float(u), 1.0)
        if isinstance(node, Param):
            return DualNumber(_constant(node.name, constants), 0.0)
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, BinOp):
            a, b = ev(node.left), ev(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        if isinstance(node, Pow):
            return ev(node.base) ** node.exponent
        if isinstance(node, Call):
            return _apply(node.func, ev(node.arg))
        raise TypeError(f"not an expression node: {node!r}")

    out = ev(e)
    if not (math.isfinite(out.value) and math.isfinite(out.deriv)):
        raise DomainError(f"non-finite result at u={u!r}")
    return out


# --- tape compilation ------------------------------------------------------
# Flat postfix program interpreted by the numeric kernels. Opcodes are shared
# with lorentzlox.kernels.

OP_CONST, OP_VAR, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_NEG, OP_POW = range(8)
OP_SIN, OP_COS, OP_SINH, OP_COSH, OP_EXP, OP_LOG, OP_SQRT = range(8, 15)
_FUNC_OPS = dict(zip(FUNCTIONS, range(OP_SIN, OP_SQRT + 1)))
_BIN_OPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}


@dataclass(frozen=True, eq=False)
class Tape:
    ops: np.ndarray   # int64 opcodes
    args: np.ndarray  # float64 literal value or integer exponent
    depth: int


def compile_tape(e: Expr, constants: Mapping[str, float] | None = None) -> Tape:
    """Flatten ``e`` to postfix with constants bound."""
    constants = constants or {}
    ops: list[int] = []
    args: list[float] = []
    depth = 0
    height = 0

    def emit(op, arg=0.0, delta=0):
        nonlocal depth, height
        ops.append(op)
        args.append(float(arg))
        height += delta
        depth = max(depth, height)

    def walk(node):
        if isinstance(node, Num):
            emit(OP_CONST, node.value, 1)
        elif isinstance(node, Var):
            emit(OP_VAR, 0.0, 1)
        elif isinstance(node, Param):
            emit(OP_CONST, _constant(node.name, constants), 1)
        elif isinstance(node, Neg):
            walk(node.operand)
            emit(OP_NEG)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
            emit(_BIN_OPS[node.op], 0.0, -1)
        elif isinstance(node, Pow):
            walk(node.base)
            emit(OP_POW, node.exponent)
        elif isinstance(node, Call):
            walk(node.arg)
            emit(_FUNC_OPS[node.func])
        else:
            raise TypeError(f"not an expression node: {node!r}")

    walk(e)
    return Tape(np.asarray(ops, dtype=np.int64), np.asarray(args, dtype=np.float64), max(depth, 1))


ZERO_TAPE = compile_tape(Num(0.0))
