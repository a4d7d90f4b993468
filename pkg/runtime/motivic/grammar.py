"""Textual motive expressions: canonical printing and a recursive-descent parser.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | 's' | 'L' | 'chi(' INT '/' INT ')' | 'GLinv(' INT ')'
            | 'GL(' INT ')' | 'mu(' INT ')' | 'Gr(' INT ',' INT ')'
            | '[' NAME ']' | '(' expr ')'

``*`` is the naive product unless the parser runs in exotic mode. Canonical
output lists trivial-sector terms by ascending power of s, then one group per
distinct sector polynomial, e.g. ``1 - 3*L - 2*s*(chi(1/4)+chi(1/2)+chi(3/4))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from runtime.motivic.errors import LocalizationError, ParseError
from runtime.motivic.motive import (
    ZERO_CHAR,
    MotiveExpr,
    curve_c1,
    curve_c2,
    cyclotomic_in_l,
    gl_class,
    grassmannian_class,
    mu_n_class,
    mul_exotic,
    mul_naive,
)

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>\[[A-Za-z_][A-Za-z0-9_']*\])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^(),/])"
)


def library_names() -> dict[str, MotiveExpr]:
    """Named classes available to every expression unless overridden."""
    return {"C1": curve_c1(), "C2": curve_c2()}


# ------------------------------------------------------------------- printing
def _power_text(exponent: int) -> str:
    if exponent == 0:
        return ""
    if exponent % 2 == 0:
        half = exponent // 2
        return "L" if half == 1 else f"L^{half}"
    half = (exponent - 1) // 2
    if half == 0:
        return "s"
    return "s*L" if half == 1 else f"s*L^{half}"


def _monomial_text(coeff: int, exponent: int) -> str:
    base = _power_text(exponent)
    magnitude = abs(coeff)
    if not base:
        return str(magnitude)
    if magnitude == 1:
        return base
    return f"{magnitude}*{base}"


def _join(parts: list[tuple[int, str]]) -> str:
    """Join ``(sign, text)`` pieces with spaced binary operators."""
    out = ""
    for i, (sign, text) in enumerate(parts):
        if i == 0:
            out = text if sign > 0 else f"-{text}"
        else:
            out += f" + {text}" if sign > 0 else f" - {text}"
    return out


def _laurent_text(coefficients: Mapping[int, int]) -> str:
    parts = [
        (1 if c > 0 else -1, _monomial_text(c, e))
        for e, c in sorted(coefficients.items())
        if c
    ]
    return _join(parts) if parts else "0"


def _char_text(char: Fraction) -> str:
    return f"chi({char.numerator}/{char.denominator})"


def _factor_text(d: int) -> str:
    poly = cyclotomic_in_l(d)
    terms = sorted(((m[0], int(c)) for m, c in poly.items()), reverse=True)
    parts = [(1 if c > 0 else -1, _monomial_text(c, e)) for e, c in terms]
    return _join(parts)


def _numerator_text(m: MotiveExpr) -> str:
    parts: list[tuple[int, str]] = []
    trivial = m.sector(ZERO_CHAR)
    for e, c in sorted(trivial.items()):
        parts.append((1 if c > 0 else -1, _monomial_text(c, e)))

    groups: dict[tuple, list[Fraction]] = {}
    for char in m.characters():
        if char == ZERO_CHAR:
            continue
        key = tuple(sorted(m.sector(char).items()))
        groups.setdefault(key, []).append(char)

    for key, chars in sorted(groups.items(), key=lambda item: min(item[1])):
        chars = sorted(chars)
        group = (
            _char_text(chars[0])
            if len(chars) == 1
            else "(" + "+".join(_char_text(c) for c in chars) + ")"
        )
        if len(key) == 1:
            exponent, coeff = key[0]
            base = _power_text(exponent)
            magnitude = abs(coeff)
            prefix = ""
            if magnitude != 1:
                prefix = f"{magnitude}*"
            if base:
                prefix += f"{base}*"
            parts.append((1 if coeff > 0 else -1, prefix + group))
        else:
            parts.append((1, f"({_laurent_text(dict(key))})*{group}"))
    return _join(parts) if parts else "0"


def format_motive(m: MotiveExpr) -> str:
    """Canonical, diff-stable text for a motive."""
    if m.is_zero():
        return "0"
    numerator = _numerator_text(m)
    if m.is_polynomial():
        return numerator
    factors = "*".join(
        f"({_factor_text(d)})^-{k}" for d, k in sorted(m.denominator, reverse=True)
    )
    return f"({numerator})*{factors}"


def format_sector_data(data: Mapping[Fraction, Mapping[int, int]]) -> str:
    """Render ``chi_eq`` output: one ``chi(k/n): poly`` entry per sector."""
    if not data:
        return "{}"
    items = [f"{_char_text(Fraction(c))}: {_laurent_text(p)}" for c, p in sorted(data.items())]
    return "{" + ", ".join(items) + "}"


# -------------------------------------------------------------------- parsing
@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    offset = 0
    while offset < len(text):
        match = _TOKEN_RE.match(text, offset)
        if match is None:
            line, column = _position(text, offset)
            raise ParseError(f"unexpected character {text[offset]!r}", line, column)
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), offset))
        offset = match.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Mapping[str, MotiveExpr], exotic: bool, line_offset: int):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.names = names
        self.mul = mul_exotic if exotic else mul_naive
        self.exotic = exotic
        self.line_offset = line_offset

    def error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        token = token or self.tokens[self.pos]
        line, column = _position(self.text, token.offset)
        return ParseError(message, line + self.line_offset, column)

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def accept(self, text: str) -> bool:
        if self.current.kind in ("op", "ident") and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        token = self.current
        if not self.accept(text):
            found = token.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}", token)
        return token

    def integer(self) -> int:
        token = self.current
        if token.kind != "int":
            raise self.error(f"expected an integer, found {token.text or 'end of input'!r}", token)
        self.pos += 1
        return int(token.text)

    def parse(self) -> MotiveExpr:
        value = self.expr()
        if self.current.kind != "eof":
            raise self.error(f"unexpected {self.current.text!r}")
        return value

    def expr(self) -> MotiveExpr:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> MotiveExpr:
        value = self.unary()
        while self.accept("*"):
            value = self.mul(value, self.unary())
        return value

    def unary(self) -> MotiveExpr:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> MotiveExpr:
        start = self.current
        base = self.atom()
        if not self.accept("^"):
            return base
        negative = self.accept("-")
        exponent = self.integer()
        if negative:
            try:
                base = base.inverse()
            except LocalizationError as err:
                raise self.error(f"negative power of a non-unit: {err}", start) from err
        return base.power(exponent, exotic=self.exotic)

    def _call_args(self, count: int, separator: str = ",") -> list[int]:
        self.expect("(")
        values = [self.integer()]
        for _ in range(count - 1):
            self.expect(separator)
            values.append(self.integer())
        self.expect(")")
        return values

    def atom(self) -> MotiveExpr:
        token = self.current
        if token.kind == "int":
            self.pos += 1
            return MotiveExpr.from_int(int(token.text))
        if token.kind == "name":
            self.pos += 1
            key = token.text[1:-1]
            if key not in self.names:
                raise self.error(f"unknown class [{key}]", token)
            return self.names[key]
        if token.kind == "op" and token.text == "(":
            self.pos += 1
            value = self.expr()
            self.expect(")")
            return value
        if token.kind == "ident":
            self.pos += 1
            word = token.text
            if word == "s":
                return MotiveExpr.sqrt_l()
            if word == "L":
                return MotiveExpr.lefschetz()
            try:
                if word == "chi":
                    k, n = self._call_args(2, "/")
                    if n == 0:
                        raise self.error("chi denominator must be positive", token)
                    return MotiveExpr.character(k, n)
                if word == "GLinv":
                    (n,) = self._call_args(1)
                    return gl_class(n).inverse()
                if word == "GL":
                    (n,) = self._call_args(1)
                    return gl_class(n)
                if word == "mu":
                    (n,) = self._call_args(1)
                    return mu_n_class(n)
                if word == "Gr":
                    n, i = self._call_args(2)
                    return grassmannian_class(n, i)
            except ValueError as err:
                raise self.error(str(err), token) from err
            raise self.error(f"unknown identifier {word!r}", token)
        raise self.error(f"unexpected {token.text or 'end of input'!r}", token)


def parse_motive(
    text: str,
    names: Optional[Mapping[str, MotiveExpr]] = None,
    exotic: bool = False,
    line_offset: int = 0,
) -> MotiveExpr:
    """Parse a motive expression. ``names`` extends the library classes [C1], [C2]."""
    scope = library_names()
    if names:
        scope.update(names)
    return _Parser(text, scope, exotic, line_offset).parse()
