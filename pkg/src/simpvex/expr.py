"""Arithmetic expressions over declared real variables.

Small expression language used for function definitions in corpus cases:
literals, variables, + - * / ^ (right-associative), unary minus, the
functions sin cos exp log abs sqrt, and a lazy three-way conditional
if(cond, then, else) whose condition may combine comparisons with
"and"/"or".  Precedence, loosest to tightest:

    or < and < comparisons < + - < * / < unary minus < ^

The full grammar ships in docs/grammar.ebnf.  Comparisons evaluate to
1.0/0.0 and "if" treats any non-zero condition as true; only the taken
branch of a conditional is evaluated, so the untaken branch may be
outside its domain.  Evaluation is pure and deterministic: the same AST
evaluated at the same inputs always returns the same bit pattern.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Tuple, Union

from .errors import EvalDomainError, ParseError
from .reports import VERIFIED, VIOLATED, PropertyReport

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "Bin",
    "Call",
    "If",
    "parse",
    "evaluate",
    "compile_expr",
    "pretty",
    "check_derivative",
    "FUNCTIONS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


Expr = Union[Num, Var, Neg, Bin, Call, If]

FUNCTIONS = ("sin", "cos", "exp", "log", "abs", "sqrt")
_KEYWORDS = ("if", "and", "or")
_CMP_OPS = ("<", "<=", ">", ">=", "==")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|[-+*/^(),<>])
    """,
    re.VERBOSE,
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(source, pos, f"unexpected character {source[pos]!r}")
        if m.lastgroup == "number":
            tokens.append(("number", m.group(), pos))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group(), pos))
        elif m.lastgroup == "op":
            tokens.append(("op", m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: frozenset):
        self.source = source
        self.variables = variables
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept_op(self, *ops):
        kind, text, _ = self.peek()
        if kind == "op" and text in ops:
            return self.advance()
        return None

    def accept_name(self, *names):
        kind, text, _ = self.peek()
        if kind == "name" and text in names:
            return self.advance()
        return None

    def expect_op(self, op, what):
        tok = self.accept_op(op)
        if tok is None:
            _, text, pos = self.peek()
            raise ParseError(self.source, pos, f"expected {what}")
        return tok

    def fail_here(self, reason):
        _, _, pos = self.peek()
        raise ParseError(self.source, pos, reason)

    # grammar, loosest binding first

    def parse_expression(self):
        node = self.parse_and()
        while self.accept_name("or"):
            node = Bin("or", node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_comparison()
        while self.accept_name("and"):
            node = Bin("and", node, self.parse_comparison())
        return node

    def parse_comparison(self):
        node = self.parse_sum()
        kind, text, _ = self.peek()
        if kind == "op" and text in _CMP_OPS:
            self.advance()
            node = Bin(text, node, self.parse_sum())
            kind, text, _ = self.peek()
            if kind == "op" and text in _CMP_OPS:
                self.fail_here("chained comparisons are not supported")
        return node

    def parse_sum(self):
        node = self.parse_term()
        while True:
            tok = self.accept_op("+", "-")
            if tok is None:
                return node
            node = Bin(tok[1], node, self.parse_term())

    def parse_term(self):
        node = self.parse_factor()
        while True:
            tok = self.accept_op("*", "/")
            if tok is None:
                return node
            node = Bin(tok[1], node, self.parse_factor())

    def parse_factor(self):
        if self.accept_op("-"):
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        if self.accept_op("^"):
            # exponent re-enters at factor level: ^ is right-associative
            # and 2^-3 parses as 2^(-3)
            node = Bin("^", node, self.parse_factor())
        return node

    def parse_atom(self):
        kind, text, pos = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(text))
        if kind == "op" and text == "(":
            self.advance()
            node = self.parse_expression()
            self.expect_op(")", "')'")
            return node
        if kind == "name":
            if text == "if":
                self.advance()
                self.expect_op("(", "'(' after 'if'")
                cond = self.parse_expression()
                self.expect_op(",", "',' after the condition")
                then = self.parse_expression()
                self.expect_op(",", "',' after the second branch")
                other = self.parse_expression()
                self.expect_op(")", "')'")
                return If(cond, then, other)
            if text in ("and", "or"):
                self.fail_here("expected an operand")
            self.advance()
            if self.accept_op("("):
                if text not in FUNCTIONS:
                    raise ParseError(self.source, pos, f"unknown function {text!r}")
                arg = self.parse_expression()
                self.expect_op(")", "')'")
                return Call(text, arg)
            if text not in self.variables:
                raise ParseError(self.source, pos, f"unknown variable {text!r}")
            return Var(text)
        self.fail_here("expected an operand")


def parse(source: str, variables: Iterable[str]) -> Expr:
    """Parse ``source`` into an AST over the declared ``variables``.

    Any name that is not a declared variable, a known function, or one of
    the keywords if/and/or raises ParseError, carrying the 0-based offset
    of the failure (``position`` is at most ``len(source)``).

    Example:
        >>> e = parse("if(v<=0 and u<=0, v-u, u-v)", {"v", "u"})
        >>> evaluate(e, {"v": -1.0, "u": -2.0})
        1.0
    """
    declared = frozenset(variables)
    reserved = declared.intersection(FUNCTIONS + _KEYWORDS)
    if reserved:
        raise ValueError(f"variable names collide with reserved words: {sorted(reserved)}")
    parser = _Parser(source, declared)
    node = parser.parse_expression()
    kind, text, pos = parser.peek()
    if kind != "eof":
        raise ParseError(source, pos, f"unexpected trailing input {text!r}")
    return node


def pretty(e: Expr) -> str:
    """Render ``e`` fully parenthesised so reparsing gives the same AST."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{pretty(e.operand)})"
    if isinstance(e, Bin):
        return f"({pretty(e.left)} {e.op} {pretty(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({pretty(e.arg)})"
    if isinstance(e, If):
        return f"if({pretty(e.cond)}, {pretty(e.then)}, {pretty(e.other)})"
    raise TypeError(f"not an expression node: {e!r}")


def _guarded_log(x, text):
    if x <= 0.0:
        raise EvalDomainError(text, x, "log of non-positive argument")
    return math.log(x)


def _guarded_sqrt(x, text):
    if x < 0.0:
        raise EvalDomainError(text, x, "square root of negative argument")
    return math.sqrt(x)


def _guarded_exp(x, text):
    try:
        return math.exp(x)
    except OverflowError:
        raise EvalDomainError(text, x, "overflow in exp") from None


_CALL_IMPL = {
    "sin": lambda x, text: math.sin(x),
    "cos": lambda x, text: math.cos(x),
    "exp": _guarded_exp,
    "log": _guarded_log,
    "abs": lambda x, text: abs(x),
    "sqrt": _guarded_sqrt,
}


def _build(e: Expr, index: Mapping[str, int]) -> Callable:
    """Compile ``e`` to a closure taking the argument tuple.

    Closure compilation keeps grid-scale sampling fast without giving up
    scalar semantics (the lazy conditional rules out vectorisation).
    """
    if isinstance(e, Num):
        v = e.value
        return lambda a: v
    if isinstance(e, Var):
        try:
            i = index[e.name]
        except KeyError:
            raise ValueError(f"unbound variable {e.name!r}") from None
        return lambda a: a[i]
    if isinstance(e, Neg):
        c = _build(e.operand, index)
        return lambda a: -c(a)
    if isinstance(e, Bin):
        op = e.op
        if op in ("and", "or"):
            left = _build(e.left, index)
            right = _build(e.right, index)
            if op == "and":
                return lambda a: (1.0 if right(a) != 0.0 else 0.0) if left(a) != 0.0 else 0.0
            return lambda a: 1.0 if left(a) != 0.0 else (1.0 if right(a) != 0.0 else 0.0)
        left = _build(e.left, index)
        right = _build(e.right, index)
        if op == "+":
            return lambda a: left(a) + right(a)
        if op == "-":
            return lambda a: left(a) - right(a)
        if op == "*":
            return lambda a: left(a) * right(a)
        if op == "/":
            text = pretty(e)
            def _div(a):
                den = right(a)
                if den == 0.0:
                    raise EvalDomainError(text, den, "division by zero")
                return left(a) / den
            return _div
        if op == "^":
            text = pretty(e)
            def _pow(a):
                base = left(a)
                exponent = right(a)
                if base < 0.0 and exponent != math.floor(exponent):
                    raise EvalDomainError(text, base, "fractional power of negative base")
                if base == 0.0 and exponent < 0.0:
                    raise EvalDomainError(text, base, "zero raised to a negative power")
                try:
                    return base ** exponent
                except OverflowError:
                    raise EvalDomainError(text, base, "overflow in power") from None
            return _pow
        if op == "<":
            return lambda a: 1.0 if left(a) < right(a) else 0.0
        if op == "<=":
            return lambda a: 1.0 if left(a) <= right(a) else 0.0
        if op == ">":
            return lambda a: 1.0 if left(a) > right(a) else 0.0
        if op == ">=":
            return lambda a: 1.0 if left(a) >= right(a) else 0.0
        if op == "==":
            # exact IEEE comparison, by design
            return lambda a: 1.0 if left(a) == right(a) else 0.0
        raise ValueError(f"unknown operator {op!r}")
    if isinstance(e, Call):
        impl = _CALL_IMPL[e.name]
        arg = _build(e.arg, index)
        text = pretty(e)
        return lambda a: impl(arg(a), text)
    if isinstance(e, If):
        cond = _build(e.cond, index)
        then = _build(e.then, index)
        other = _build(e.other, index)
        # only the taken branch is evaluated
        return lambda a: then(a) if cond(a) != 0.0 else other(a)
    raise TypeError(f"not an expression node: {e!r}")


@lru_cache(maxsize=None)
def compile_expr(e: Expr, var_order: Tuple[str, ...]) -> Callable[..., float]:
    """Compile ``e`` into a positional callable over ``var_order``."""
    index = {name: i for i, name in enumerate(var_order)}
    root = _build(e, index)
    def compiled(*args: float) -> float:
        return root(args)
    return compiled


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` with the given variable bindings."""
    order = tuple(sorted(bindings))
    fn = compile_expr(e, order)
    return fn(*(float(bindings[name]) for name in order))


def check_derivative(f: Expr, df: Expr, interval: Tuple[float, float],
                     points: int = 11, tol: float = 1e-4) -> PropertyReport:
    """Cross-check ``df`` against central finite differences of ``f``.

    Samples ``points`` equispaced interior points of ``interval`` and
    compares df(x) with (f(x+h) - f(x-h)) / (2h), h = max(1e-6, 1e-6|x|).
    The mismatch is measured relative to max(1, |df(x)|, |fd|), which
    keeps the gate meaningful where the derivative passes through zero.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if points < 3:
        raise ValueError("need at least 3 sample points")
    f_fn = compile_expr(f, ("x",))
    df_fn = compile_expr(df, ("x",))
    worst = -math.inf
    witness = None
    for i in range(points):
        x = lo + (i + 1) * (hi - lo) / (points + 1)
        h = max(1e-6, 1e-6 * abs(x))
        fd = (f_fn(x + h) - f_fn(x - h)) / (2.0 * h)
        want = df_fn(x)
        mismatch = abs(want - fd) / max(1.0, abs(want), abs(fd))
        if mismatch > worst:
            worst = mismatch
            witness = (x, want, fd)
    if worst > tol:
        return PropertyReport("derivative", VIOLATED, worst, witness, points)
    return PropertyReport("derivative", VERIFIED, worst, None, points)
