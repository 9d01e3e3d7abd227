"""Parser and printer for rational functions in q and x.

Grammar (whitespace is ignored)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := INT | '(' '-'? INT ')'
    atom     := INT | 'q' | 'x' | '(' expr ')'

so ``-q^2`` is ``-(q^2)`` and ``2/3*x`` is ``(2/3)*x``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DivisionByZeroExpression, ExpressionSyntaxError
from .tower import QQ, Field, RatFn


class _Parser:
    def __init__(self, text: str, fld: Field):
        self.text = text
        self.pos = 0
        self.fld = fld

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expect(self, ch):
        if self.peek() != ch:
            found = self.peek()
            raise ExpressionSyntaxError(
                f"expected {ch!r}, found {'end of input' if found is None else repr(found)}", self.pos
            )
        self.pos += 1

    def integer(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ExpressionSyntaxError("expected an integer", start)
        return int(self.text[start:self.pos])

    def parse(self) -> RatFn:
        if self.peek() is None:
            raise ExpressionSyntaxError("empty expression", self.pos)
        out = self.expr()
        if self.peek() is not None:
            raise ExpressionSyntaxError(f"unexpected {self.peek()!r}", self.pos)
        return out

    def expr(self):
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            where = self.pos
            self.pos += 1
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZeroExpression(f"division by zero at position {where}")
                acc = acc / rhs
        return acc

    def unary(self):
        if self.peek() == "-":
            self.pos += 1
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() != "^":
            return base
        where = self.pos
        self.pos += 1
        if self.peek() == "(":
            self.pos += 1
            neg = False
            if self.peek() == "-":
                neg = True
                self.pos += 1
            e = self.integer()
            self.expect(")")
            e = -e if neg else e
        else:
            e = self.integer()
        if e < 0 and base.is_zero():
            raise DivisionByZeroExpression(f"negative power of zero at position {where}")
        return base**e

    def atom(self):
        ch = self.peek()
        if ch is None:
            raise ExpressionSyntaxError("unexpected end of input", self.pos)
        if ch.isdigit():
            return self.fld(self.integer())
        if ch == "q":
            self.pos += 1
            return self.fld.q
        if ch == "x":
            self.pos += 1
            return self.fld.x
        if ch == "(":
            self.pos += 1
            out = self.expr()
            self.expect(")")
            return out
        raise ExpressionSyntaxError(f"unexpected {ch!r}", self.pos)


def parse_expr(text: str, fld: Field = QQ) -> RatFn:
    """Parse an expression into a canonical element of k(q)(x)."""
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return fld(text)
        raise ExpressionSyntaxError(f"expected a string, got {type(text).__name__}", 0)
    try:
        return _Parser(text, fld).parse()
    except ZeroDivisionError as exc:
        raise DivisionByZeroExpression(str(exc)) from None


def format_expr(f) -> str:
    """Canonical string; parse_expr(format_expr(f)) == f."""
    return str(f)
