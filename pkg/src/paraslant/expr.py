"""A small expression language for coordinate functions.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INTEGER)?
    atom   := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

Function names: cos, sin, cosh, sinh, exp, ln, sqrt.  Multiplication is never
implicit and exponents are integer literals.  Names that are not functions are
variables; whether a variable is a coordinate or a named constant is decided
only by the bindings passed to :func:`evaluate`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from . import jet
from .errors import ExprSyntaxError, UnboundVariable, UnknownFunction

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "Call",
    "BinOp",
    "Pow",
    "parse",
    "evaluate",
    "free_vars",
    "to_text",
    "FUNCTIONS",
]

FUNCTIONS = jet.FUNCTIONS


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int

    def __str__(self) -> str:
        return to_text(self)


Expr = Union[Num, Var, Neg, Call, BinOp, Pow]


# -- tokenizer --------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(pos, "a number, name, operator or parenthesis", text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# -- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _error(self, expected: str) -> ExprSyntaxError:
        return ExprSyntaxError(self.tok.offset, expected, self.text)

    def _is(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def _expect(self, text: str) -> None:
        if not self._is(text):
            raise self._error(repr(text))
        self.i += 1

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self._error("an operator or end of input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self._is("+") or self._is("-"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self._is("*") or self._is("/"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self._is("-"):
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if not self._is("^"):
            return base
        self.i += 1
        sign = 1
        if self._is("-"):
            sign = -1
            self.i += 1
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            raise self._error("an integer exponent")
        self.i += 1
        if self._is("^"):
            raise self._error("parentheses around a repeated power")
        return Pow(base, sign * int(tok.text))

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self._is("("):
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(tok.text, tok.offset)
                self.i += 1
                arg = self.expr()
                self._expect(")")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                raise self._error(f"'(' after function {tok.text}")
            return Var(tok.text)
        if self._is("("):
            self.i += 1
            e = self.expr()
            self._expect(")")
            return e
        raise self._error("a number, name or '('")


def parse(text: str) -> Expr:
    """Parse ``text`` into an immutable AST."""
    return _Parser(text).parse()


# -- evaluation -------------------------------------------------------------


def evaluate(e: Expr, bindings: Mapping[str, object]):
    """Evaluate ``e`` in the arithmetic of whatever carriers ``bindings`` hold.

    Floats, :class:`~paraslant.jet.Jet1` and :class:`~paraslant.jet.Jet2`
    values may be mixed; literals stay plain floats.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return bindings[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, BinOp):
        a = evaluate(e.left, bindings)
        b = evaluate(e.right, bindings)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return jet.divide(a, b)
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    if isinstance(e, Call):
        return jet.apply(e.fn, evaluate(e.arg, bindings))
    if isinstance(e, Pow):
        return jet.power(evaluate(e.base, bindings), e.exponent)
    raise TypeError(f"not an expression node: {e!r}")


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, (Neg, Call)):
        return free_vars(e.arg)
    return free_vars(e.base)


def is_constant(e: Expr, coords) -> bool:
    return not (free_vars(e) & set(coords))


# -- printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG, _POW, _ATOM = 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _num_text(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_text(e: Expr) -> str:
    """Print with the minimal parentheses that reparse to the same tree."""
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return f"-({inner})" if _prec(e.arg) < _NEG else f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if _prec(e.base) <= _POW:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    p = _PREC[e.op]
    left = to_text(e.left)
    right = to_text(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def as_expr(value) -> Expr:
    """Accept an already-parsed node, a string, or a plain number."""
    if isinstance(value, (Num, Var, Neg, Call, BinOp, Pow)):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        x = float(value)
        return Neg(Num(-x)) if x < 0 else Num(x)
    raise TypeError(f"cannot interpret {value!r} as an expression")
