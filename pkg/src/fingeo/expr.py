"""Recursive-descent parser for GF(q)-linear coordinate expressions.

Grammar (whitespace is ignored)::

    expr  := term ('+' term)*
    term  := [coeff '*'] var [frob]
    frob  := '^' 'q' ['^' INT]  |  '^' '{' 'q' ['^' INT] '}'
    coeff := INT | '[' INT (',' INT)* ']'
    var   := identifier

A coefficient is a field element of GF(q^t).  An integer literal ``n`` is the
element whose base-p digits are the GF(p)-coefficients of n; a bracketed list
gives the little-endian coefficients directly.  So over GF(16), ``3`` and
``[1,1]`` both denote xi + 1.

Examples: ``x``, ``x^q^2``, ``y^{q^3}``, ``y + 2*z^{q^2}``, ``[0,1]*x^q``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass


class ExpressionError(ValueError):
    """Malformed expression; records the 1-based column and offending token."""

    def __init__(self, message: str, text: str, column: int, token: str):
        self.text, self.column, self.token = text, column, token
        super().__init__(f"{message} at column {column} (token {token!r}) in {text!r}")


class FrobeniusReductionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Term:
    coeff: int
    var: str
    frob: int = 0

    def render(self) -> str:
        s = self.var if self.frob == 0 else (f"{self.var}^q" if self.frob == 1 else f"{self.var}^q^{self.frob}")
        return s if self.coeff == 1 else f"{self.coeff}*{s}"


@dataclass(frozen=True)
class Expression:
    terms: tuple[Term, ...]

    def __str__(self) -> str:
        return " + ".join(t.render() for t in self.terms)

    def variables(self) -> set[str]:
        return {t.var for t in self.terms}


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            out.append(("INT", m.group(1), col))
        elif m.group(2) is not None:
            out.append(("NAME", m.group(2), col))
        else:
            out.append(("SYM", m.group(3), col))
        pos = m.end()
    out.append(("EOF", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, p: int, t: int | None, variables):
        self.text, self.p, self.t = text, p, t
        self.variables = None if variables is None else set(variables)
        self.toks = _tokenize(text)
        self.i = 0

    # -- helpers ---------------------------------------------------------
    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok=None):
        kind, val, col = tok or self.peek()
        raise ExpressionError(message, self.text, col, val if kind != "EOF" else "<end>")

    def expect_sym(self, sym: str):
        tok = self.peek()
        if tok[0] != "SYM" or tok[1] != sym:
            self.fail(f"expected {sym!r}")
        return self.next()

    def is_sym(self, sym: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "SYM" and val == sym

    # -- grammar ---------------------------------------------------------
    def expr(self) -> Expression:
        terms = [self.term()]
        while self.is_sym("+"):
            self.next()
            terms.append(self.term())
        if self.peek()[0] != "EOF":
            self.fail("unexpected token")
        return Expression(tuple(terms))

    def term(self) -> Term:
        coeff = 1
        if self.peek()[0] == "INT" or self.is_sym("["):
            coeff = self.coeff()
            self.expect_sym("*")
        kind, name, _ = tok = self.peek()
        if kind != "NAME":
            self.fail("expected a variable name")
        self.next()
        if self.variables is not None and name not in self.variables:
            self.fail("unknown variable", tok)
        frob = self.frob() if self.is_sym("^") else 0
        return Term(coeff, name, frob)

    def coeff(self) -> int:
        if self.peek()[0] == "INT":
            return int(self.next()[1])
        self.expect_sym("[")
        digits = []
        while True:
            tok = self.peek()
            if tok[0] != "INT":
                self.fail("malformed coefficient literal")
            d = int(self.next()[1])
            if d >= self.p:
                self.fail(f"coefficient digit must be below {self.p}", tok)
            digits.append(d)
            if self.is_sym(","):
                self.next()
                continue
            self.expect_sym("]")
            break
        return sum(d * self.p**k for k, d in enumerate(digits))

    def frob(self) -> int:
        self.expect_sym("^")
        braced = self.is_sym("{")
        if braced:
            self.next()
        kind, val, _ = self.peek()
        if kind != "NAME" or val != "q":
            self.fail("expected 'q' after '^'")
        self.next()
        exp = 1
        if self.is_sym("^"):
            self.next()
            tok = self.peek()
            if tok[0] != "INT":
                self.fail("expected an integer Frobenius exponent")
            exp = int(self.next()[1])
        if braced:
            self.expect_sym("}")
        if self.t is not None and exp >= self.t:
            warnings.warn(
                f"Frobenius exponent {exp} reduced modulo t={self.t} to {exp % self.t} in {self.text!r}",
                FrobeniusReductionWarning,
                stacklevel=5,
            )
            exp %= self.t
        return exp


def parse_expression(text: str, p: int = 2, t: int | None = None, variables=None) -> Expression:
    """Parse ``text``; ``variables`` restricts the allowed names, ``t`` reduces exponents."""
    return _Parser(text, p, t, variables).expr()
