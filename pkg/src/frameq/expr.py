"""Parsing of polynomial expression strings over chart variables.

The grammar is small on purpose: + - * / ^ with parentheses, unary sign,
integer and decimal literals, the imaginary unit ``i``, and the chart's
variable names.  Literals become exact rationals (decimals included, so
"0.3" means 3/10), and division is restricted to nonzero constant
divisors, which keeps every parse inside the polynomial ring.  Errors
report the character position they refer to.
"""

from __future__ import annotations

from fractions import Fraction

from .chart import Chart
from .errors import ExpressionError
from .polynomial import PhasePolynomial
from .scalars import GaussianRational

_TOK_NUMBER = "number"
_TOK_NAME = "name"
_TOK_OP = "op"
_TOK_END = "end"

_OPERATORS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    k = 0
    n = len(text)
    while k < n:
        c = text[k]
        if c.isspace():
            k += 1
            continue
        if c in _OPERATORS:
            tokens.append((_TOK_OP, c, k))
            k += 1
            continue
        if c.isdigit() or (c == "." and k + 1 < n and text[k + 1].isdigit()):
            start = k
            seen_dot = False
            while k < n and (text[k].isdigit() or (text[k] == "." and not seen_dot)):
                seen_dot = seen_dot or text[k] == "."
                k += 1
            tokens.append((_TOK_NUMBER, text[start:k], start))
            continue
        if c.isalpha() or c == "_":
            start = k
            while k < n and (text[k].isalnum() or text[k] == "_"):
                k += 1
            tokens.append((_TOK_NAME, text[start:k], start))
            continue
        raise ExpressionError(
            f"unexpected character {c!r} at position {k}", position=k
        )
    tokens.append((_TOK_END, "", n))
    return tokens


class _Parser:
    def __init__(self, chart: Chart, text: str):
        self.chart = chart
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, position):
        raise ExpressionError(f"{message} at position {position}", position=position)

    def parse(self) -> PhasePolynomial:
        value = self.expression()
        kind, text, where = self.peek()
        if kind is not _TOK_END and kind != _TOK_END:
            self.fail(f"unexpected {text!r}", where)
        return value

    def expression(self) -> PhasePolynomial:
        kind, text, where = self.peek()
        if kind == _TOK_OP and text in "+-":
            self.advance()
            value = self.term()
            if text == "-":
                value = -value
        else:
            value = self.term()
        while True:
            kind, text, where = self.peek()
            if kind == _TOK_OP and text in "+-":
                self.advance()
                rhs = self.term()
                value = value + rhs if text == "+" else value - rhs
            else:
                return value

    def term(self) -> PhasePolynomial:
        value = self.signed_factor()
        while True:
            kind, text, where = self.peek()
            if kind == _TOK_OP and text == "*":
                self.advance()
                value = value * self.signed_factor()
            elif kind == _TOK_OP and text == "/":
                self.advance()
                divisor = self.signed_factor()
                if not divisor.is_constant():
                    self.fail("division only by nonzero constants", where)
                c = divisor.constant_value()
                if c == GaussianRational.from_value(0):
                    self.fail("division by zero", where)
                value = value * PhasePolynomial.constant(
                    self.chart, GaussianRational.from_value(1) / c
                )
            else:
                return value

    def signed_factor(self) -> PhasePolynomial:
        kind, text, where = self.peek()
        if kind == _TOK_OP and text in "+-":
            self.advance()
            inner = self.signed_factor()
            return -inner if text == "-" else inner
        return self.power()

    def power(self) -> PhasePolynomial:
        base = self.atom()
        kind, text, where = self.peek()
        if kind == _TOK_OP and text == "^":
            self.advance()
            kind, text, where = self.peek()
            if kind != _TOK_NUMBER or "." in text:
                self.fail("exponent must be a nonnegative integer", where)
            self.advance()
            return base ** int(text)
        return base

    def atom(self) -> PhasePolynomial:
        kind, text, where = self.advance()
        if kind == _TOK_NUMBER:
            return PhasePolynomial.constant(self.chart, Fraction(text))
        if kind == _TOK_NAME:
            if text == "i":
                return PhasePolynomial.constant(
                    self.chart, GaussianRational.from_value(1j)
                )
            try:
                self.chart.index_of(text)
            except (KeyError, ValueError):
                self.fail(f"unknown variable {text!r}", where)
            return self.chart.var(text)
        if kind == _TOK_OP and text == "(":
            value = self.expression()
            kind, text, where = self.advance()
            if not (kind == _TOK_OP and text == ")"):
                self.fail("expected ')'", where)
            return value
        self.fail(f"unexpected {text!r}" if text else "unexpected end of input", where)


def parse_polynomial(chart: Chart, text: str) -> PhasePolynomial:
    """Parse an expression string into an exact polynomial on the chart."""
    if not isinstance(text, str):
        raise ExpressionError(f"expected an expression string, got {type(text).__name__}")
    if not text.strip():
        raise ExpressionError("empty expression")
    return _Parser(chart, text).parse()
