"""Expressions in z and conj(z): parsing, evaluation, printing and
symbolic Wirtinger derivatives.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' int)?
    atom   := number | 'i' | 'z' | ident '(' expr ')' | '(' expr ')'

Calls: conj, re, im, abs2, log, exp. Derivatives are available for the
polynomial subset (literals, z, conj, +, -, *, ^, re, im, abs2 and division
by constants); anything else raises UnsupportedNode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from .core import TribvpError


class ExprSyntaxError(TribvpError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(TribvpError):
    def __init__(self, name: str, position: int = -1):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name
        self.position = position


class DomainError(TribvpError):
    pass


class UnsupportedNode(TribvpError):
    pass


CALLS = ("conj", "re", "im", "abs2", "log", "exp")


# ---------------------------------------------------------------------------
# AST


class Expression:
    """Base class of AST nodes. Nodes are immutable and compare structurally."""

    __slots__ = ()

    def evaluator(self) -> Callable[[np.ndarray], np.ndarray]:
        return _compile(self)

    def __call__(self, z):
        return evaluate(self, z)

    def to_string(self) -> str:
        return _print(self, 0)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True, eq=True)
class Num(Expression):
    value: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True, eq=True)
class Var(Expression):
    name: str = "z"


@dataclass(frozen=True, eq=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True, eq=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True, eq=True)
class Pow(Expression):
    base: Expression
    exponent: int


@dataclass(frozen=True, eq=True)
class Call(Expression):
    name: str
    arg: Expression


Z = Var("z")
ZBAR = Call("conj", Z)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if not m:
            first = len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {source[pos + first]!r}", pos + first)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Expression:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                raise ExprSyntaxError("exponent must be a non-negative integer literal", pos)
            return Pow(base, int(text))
        return base

    def atom(self) -> Expression:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "i":
                return Num(1j)
            if text == "z":
                return Z
            if text in CALLS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifier(text, pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse(source: str) -> Expression:
    if not isinstance(source, str) or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation


def _ipow(x: np.ndarray, n: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _compile(node: Expression) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, Num):
        v = node.value
        return lambda z: np.full(np.shape(z), v, dtype=complex)
    if isinstance(node, Var):
        return lambda z: np.asarray(z, dtype=complex)
    if isinstance(node, Neg):
        a = _compile(node.arg)
        return lambda z: -a(z)
    if isinstance(node, Pow):
        b = _compile(node.base)
        n = node.exponent
        return lambda z: _ipow(b(z), n)
    if isinstance(node, BinOp):
        a, b = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda z: a(z) + b(z)
        if node.op == "-":
            return lambda z: a(z) - b(z)
        if node.op == "*":
            return lambda z: a(z) * b(z)

        def divide(z):
            den = b(z)
            if np.any(den == 0):
                raise DomainError("division by zero")
            return a(z) / den

        return divide
    if isinstance(node, Call):
        a = _compile(node.arg)
        name = node.name
        if name == "conj":
            return lambda z: np.conj(a(z))
        if name == "re":
            return lambda z: np.real(a(z)).astype(complex)
        if name == "im":
            return lambda z: np.imag(a(z)).astype(complex)
        if name == "abs2":
            return lambda z: (np.abs(a(z)) ** 2).astype(complex)
        if name == "exp":
            return lambda z: np.exp(a(z))
        if name == "log":

            def log(z):
                v = a(z)
                if np.any(v == 0):
                    raise DomainError("log of zero")
                return np.log(v)

            return log
    raise UnsupportedNode(f"cannot evaluate node {node!r}")


def evaluate(expr: Expression, z):
    """Evaluate at a scalar or array; scalars give a Python complex."""
    arr = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        out = _compile(expr)(arr)
    if arr.ndim == 0:
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _print(node: Expression, parent: int) -> str:
    if isinstance(node, Num):
        re_, im_ = node.value.real, node.value.imag
        if im_ == 0:
            text, prec = _fmt_real(re_), (5 if re_ >= 0 else 1)
        elif re_ == 0:
            if im_ == 1:
                text, prec = "i", 5
            elif im_ == -1:
                text, prec = "-i", 1
            else:
                text, prec = f"{_fmt_real(im_)}*i", (2 if im_ > 0 else 1)
        else:
            sign = "+" if im_ > 0 else "-"
            mag = abs(im_)
            im_text = "i" if mag == 1 else f"{_fmt_real(mag)}*i"
            text, prec = f"{_fmt_real(re_)} {sign} {im_text}", 1
        return f"({text})" if prec <= parent else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({_print(node.arg, 0)})"
    if isinstance(node, Pow):
        base = _print(node.base, 4)
        if isinstance(node.base, Pow):  # the grammar has no chained ^
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Neg):
        text = "-" + _print(node.arg, 3)
        return f"({text})" if parent >= 3 else text
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = _print(node.left, p - 1)
        right = _print(node.right, p)
        text = f"{left} {node.op} {right}" if p == 1 else f"{left}*{right}" if node.op == "*" else f"{left}/{right}"
        return f"({text})" if p <= parent else text
    raise UnsupportedNode(f"cannot print {node!r}")


def to_string(expr: Expression) -> str:
    return expr.to_string()


# ---------------------------------------------------------------------------
# Normalisation and polynomial normal form

Poly = Dict[Tuple[int, int], complex]


def normalize(expr: Expression) -> Expression:
    """Rewrite abs2, re and im in terms of conj so only z and conj(z) remain."""
    if isinstance(expr, (Num, Var)):
        return expr
    if isinstance(expr, Neg):
        return Neg(normalize(expr.arg))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, normalize(expr.left), normalize(expr.right))
    if isinstance(expr, Pow):
        return Pow(normalize(expr.base), expr.exponent)
    if isinstance(expr, Call):
        a = normalize(expr.arg)
        if expr.name == "abs2":
            return BinOp("*", a, Call("conj", a))
        if expr.name == "re":
            return BinOp("*", Num(0.5), BinOp("+", a, Call("conj", a)))
        if expr.name == "im":
            return BinOp("*", Num(-0.5j), BinOp("-", a, Call("conj", a)))
        return Call(expr.name, a)
    raise UnsupportedNode(f"unknown node {expr!r}")


def _is_constant(expr: Expression) -> bool:
    if isinstance(expr, Num):
        return True
    if isinstance(expr, Var):
        return False
    if isinstance(expr, (Neg, Call)):
        return _is_constant(expr.arg)
    if isinstance(expr, Pow):
        return _is_constant(expr.base)
    if isinstance(expr, BinOp):
        return _is_constant(expr.left) and _is_constant(expr.right)
    return False


def _padd(a: Poly, b: Poly, sign: float = 1.0) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for (i, j), u in a.items():
        for (k, l), v in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + u * v
    return {k: v for k, v in out.items() if v != 0}


def to_polynomial(expr: Expression) -> Poly:
    """Coefficients {(a, b): c} of c z^a conj(z)^b; polynomial subset only."""
    node = normalize(expr)
    return _poly(node)


def _poly(node: Expression) -> Poly:
    if isinstance(node, Num):
        return {(0, 0): node.value} if node.value != 0 else {}
    if isinstance(node, Var):
        return {(1, 0): 1 + 0j}
    if isinstance(node, Neg):
        return {k: -v for k, v in _poly(node.arg).items()}
    if isinstance(node, Pow):
        base = _poly(node.base)
        out: Poly = {(0, 0): 1 + 0j}
        for _ in range(node.exponent):
            out = _pmul(out, base)
        return out
    if isinstance(node, BinOp):
        if node.op == "+":
            return _padd(_poly(node.left), _poly(node.right))
        if node.op == "-":
            return _padd(_poly(node.left), _poly(node.right), -1.0)
        if node.op == "*":
            return _pmul(_poly(node.left), _poly(node.right))
        if node.op == "/":
            if not _is_constant(node.right):
                raise UnsupportedNode("division by a non-constant is outside the polynomial subset")
            den = evaluate(node.right, 0j)
            if den == 0:
                raise DomainError("division by zero")
            return {k: v / den for k, v in _poly(node.left).items()}
    if isinstance(node, Call):
        if node.name == "conj":
            return {(b, a): np.conj(v) for (a, b), v in _poly(node.arg).items()}
        raise UnsupportedNode(f"{node.name}() is outside the polynomial subset")
    raise UnsupportedNode(f"unknown node {node!r}")


def from_polynomial(poly: Poly) -> Expression:
    """Canonical expression: terms sorted by total degree, then by power of z."""
    terms = sorted(((k, v) for k, v in poly.items() if v != 0),
                   key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))
    if not terms:
        return Num(0)
    node: Expression | None = None
    for (a, b), coeff in terms:
        negative = coeff.imag == 0 and coeff.real < 0
        mag = -coeff if negative else coeff
        factors: list[Expression] = []
        if a:
            factors.append(Z if a == 1 else Pow(Z, a))
        if b:
            factors.append(ZBAR if b == 1 else Pow(ZBAR, b))
        mono: Expression | None = None
        for fct in factors:
            mono = fct if mono is None else BinOp("*", mono, fct)
        if mono is None:
            term: Expression = Num(mag)
        elif mag == 1:
            term = mono
        else:
            term = BinOp("*", Num(mag), mono)
        if node is None:
            node = Neg(term) if negative else term
        else:
            node = BinOp("-" if negative else "+", node, term)
    assert node is not None
    return node


def is_polynomial(expr: Expression) -> bool:
    try:
        to_polynomial(expr)
    except (UnsupportedNode, DomainError):
        return False
    return True


def simplify(expr: Expression) -> Expression:
    """Polynomial normal form when possible, otherwise the expression unchanged."""
    try:
        return from_polynomial(to_polynomial(expr))
    except (UnsupportedNode, DomainError):
        return expr


# ---------------------------------------------------------------------------
# Wirtinger derivatives


def _d(node: Expression, wrt_bar: bool) -> Expression:
    """Rule-based derivative; wrt_bar selects d/dconj(z) over d/dz."""
    if isinstance(node, Num):
        return Num(0)
    if isinstance(node, Var):
        return Num(0) if wrt_bar else Num(1)
    if isinstance(node, Neg):
        return Neg(_d(node.arg, wrt_bar))
    if isinstance(node, BinOp):
        da, db = _d(node.left, wrt_bar), _d(node.right, wrt_bar)
        if node.op in "+-":
            return BinOp(node.op, da, db)
        if node.op == "*":
            return BinOp("+", BinOp("*", da, node.right), BinOp("*", node.left, db))
        if not _is_constant(node.right):
            raise UnsupportedNode("division by a non-constant is outside the polynomial subset")
        return BinOp("/", da, node.right)
    if isinstance(node, Pow):
        if node.exponent == 0:
            return Num(0)
        inner = Pow(node.base, node.exponent - 1) if node.exponent > 1 else Num(1)
        return BinOp("*", BinOp("*", Num(node.exponent), inner), _d(node.base, wrt_bar))
    if isinstance(node, Call):
        if node.name == "conj":
            # d/dzbar conj(g) = conj(dg/dz), and symmetrically
            return Call("conj", _d(node.arg, not wrt_bar))
        raise UnsupportedNode(f"{node.name}() is outside the polynomial subset")
    raise UnsupportedNode(f"unknown node {node!r}")


def _derivative(expr: Expression, wrt_bar: bool) -> Expression:
    node = normalize(expr)
    to_polynomial(node)  # rejects nodes outside the subset
    return from_polynomial(to_polynomial(_d(node, wrt_bar)))


def dbar(expr: Expression) -> Expression:
    """Symbolic d/dconj(z), returned in polynomial normal form."""
    return _derivative(expr, True)


def dz(expr: Expression) -> Expression:
    """Symbolic d/dz, returned in polynomial normal form."""
    return _derivative(expr, False)


def normal_derivative(expr: Expression) -> Expression:
    """z d/dz + conj(z) d/dconj(z): the radial derivative on the unit circle."""
    node = BinOp("+", BinOp("*", Z, dz(expr)), BinOp("*", ZBAR, dbar(expr)))
    return from_polynomial(to_polynomial(node))


def restrict_to_circle(expr: Expression) -> Expression:
    """Rewrite a polynomial using z*conj(z) = 1 so each monomial is a pure
    power of z or of conj(z)."""
    out: Poly = {}
    for (a, b), v in to_polynomial(expr).items():
        e = a - b
        key = (e, 0) if e >= 0 else (0, -e)
        out[key] = out.get(key, 0) + v
    return from_polynomial({k: v for k, v in out.items() if v != 0})


def value_at_zero(expr: Expression) -> complex:
    return complex(evaluate(expr, 0j))
