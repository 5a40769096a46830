"""Arithmetic expression language for generator functions and basis terms.

Grammar (conventional precedence, ``^`` binds tightest and is right
associative, unary minus sits between ``^`` and ``*``/``/``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'pi' | FUNC '(' expr ')' | VAR | '(' expr ')'

Variables are ``x1, x2, ...`` (index starts at 1, no leading zeros); the
supported functions are sin, cos, exp, abs and sqrt.  Evaluation never
returns NaN or infinity: division by zero, sqrt of a negative, a negative
base under a fractional exponent, and overflow all raise ``ExprEvalError``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "abs", "sqrt")

_VAR_RE = re.compile(r"^x[1-9][0-9]*$")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


class ExprSyntaxError(ValueError):
    """Parse failure; carries the byte offset of the offending text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ExprEvalError(ValueError):
    """Evaluation hit a domain error, missing variable, or overflow."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def index(self) -> int:
        return int(self.name[1:])


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExprAst"


ExprAst = Union[Num, Var, Neg, BinOp, Call]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, offset) triples; kind is num/ident/op/end."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # skip whitespace-only tails; anything else is a bad character
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            at = pos + (len(rest) - len(stripped))
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", offset)
        self.advance()

    def parse(self) -> ExprAst:
        node = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r} after expression", offset)
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> ExprAst:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self) -> ExprAst:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ExprAst:
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            # exponent parses at unary level: x^-2 works, x^2^3 is right assoc
            return BinOp("^", node, self.unary())
        return node

    def atom(self) -> ExprAst:
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text == "pi":
                return Num(math.pi)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if _VAR_RE.match(text):
                return Var(text)
            if text.isalpha() and self.peek()[0] == "op" and self.peek()[1] == "(":
                raise ExprSyntaxError(f"unknown function {text!r}", offset)
            raise ExprSyntaxError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"expected a value, found {text or 'end of input'!r}", offset)


def parse_expr(text: str) -> ExprAst:
    """Parse an expression string into an AST."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def free_vars(ast: ExprAst) -> list[str]:
    """Free variable names sorted by index."""
    names: set[str] = set()

    def walk(node: ExprAst):
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Neg):
            walk(node.arg)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Call):
            walk(node.arg)

    walk(ast)
    return sorted(names, key=lambda n: int(n[1:]))


def _check_pow(base: float, expo: float):
    if base < 0.0 and expo != math.floor(expo):
        raise ExprEvalError(f"negative base {base!r} under non-integer exponent {expo!r}")
    if base == 0.0 and expo < 0.0:
        raise ExprEvalError("zero raised to a negative power")


def eval_expr(ast: ExprAst, assignment: dict[str, float]) -> float:
    """Evaluate at a scalar assignment covering all free variables."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        try:
            return float(assignment[ast.name])
        except KeyError:
            raise ExprEvalError(f"missing variable {ast.name!r}") from None
    if isinstance(ast, Neg):
        return -eval_expr(ast.arg, assignment)
    if isinstance(ast, Call):
        v = eval_expr(ast.arg, assignment)
        if ast.func == "sqrt" and v < 0.0:
            raise ExprEvalError(f"sqrt of negative value {v!r}")
        try:
            r = getattr(math, ast.func)(v) if ast.func != "abs" else abs(v)
        except (ValueError, OverflowError) as exc:
            raise ExprEvalError(f"{ast.func}({v!r}): {exc}") from None
        return r
    left = eval_expr(ast.left, assignment)
    right = eval_expr(ast.right, assignment)
    if ast.op == "+":
        return left + right
    if ast.op == "-":
        return left - right
    if ast.op == "*":
        r = left * right
    elif ast.op == "/":
        if right == 0.0:
            raise ExprEvalError("division by zero")
        r = left / right
    else:
        _check_pow(left, right)
        try:
            r = left**right
        except OverflowError:
            raise ExprEvalError(f"overflow in {left!r} ^ {right!r}") from None
    if not math.isfinite(r):
        raise ExprEvalError(f"non-finite result in {ast.op!r}")
    return r


def eval_expr_block(ast: ExprAst, columns: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorised evaluation over equal-length column arrays.

    Domain errors are detected after the fact (NaN/inf propagate through
    numpy) and reported with the index of the first offending row.
    """
    with np.errstate(all="ignore"):
        out = _eval_block(ast, columns)
    bad = ~np.isfinite(out)
    if bad.any():
        row = int(np.argmax(bad))
        raise ExprEvalError(f"non-finite expression value at row {row}")
    return out


def _eval_block(ast: ExprAst, columns: dict[str, np.ndarray]) -> np.ndarray:
    if isinstance(ast, Num):
        n = len(next(iter(columns.values())))
        return np.full(n, ast.value)
    if isinstance(ast, Var):
        try:
            return columns[ast.name]
        except KeyError:
            raise ExprEvalError(f"missing variable {ast.name!r}") from None
    if isinstance(ast, Neg):
        return -_eval_block(ast.arg, columns)
    if isinstance(ast, Call):
        v = _eval_block(ast.arg, columns)
        return np.abs(v) if ast.func == "abs" else getattr(np, ast.func)(v)
    left = _eval_block(ast.left, columns)
    right = _eval_block(ast.right, columns)
    if ast.op == "+":
        return left + right
    if ast.op == "-":
        return left - right
    if ast.op == "*":
        return left * right
    if ast.op == "/":
        return left / right
    return np.power(left, right)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: ExprAst) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Num) and node.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def to_str(ast: ExprAst) -> str:
    """Render with minimal parentheses; parse_expr(to_str(a)) == a."""
    if isinstance(ast, Num):
        return repr(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Neg):
        inner = to_str(ast.arg)
        if _prec(ast.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(ast, Call):
        return f"{ast.func}({to_str(ast.arg)})"
    p = _PREC[ast.op]
    left = to_str(ast.left)
    if _prec(ast.left) < p or (_prec(ast.left) == p and ast.op == "^"):
        left = f"({left})"
    right = to_str(ast.right)
    if _prec(ast.right) < p or (_prec(ast.right) == p and ast.op in "+-*/"):
        right = f"({right})"
    return f"{left} {ast.op} {right}" if ast.op in "+-" else f"{left}{ast.op}{right}"
