"""Surface syntax for operators: z, q, s (for sigma), rationals, + - * ^ ( ).

Products are noncommutative, so ``s*z`` evaluates to ``q*z*s``.  A term
``O(z^n)`` marks a coefficient as known only modulo z**n.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .ore import OrePoly
from .series import INF, LaurentSeries, QContext

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([zqsO])|(\*\*|[-+*^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("num", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            out.append(Token("op", op, start))
        i = m.end()
    out.append(Token("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, ctx: QContext):
        self.text = text
        self.ctx = ctx
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.take()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos, self.text)
        return t

    def parse(self) -> OrePoly:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0, self.text)
        v = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.pos, self.text)
        return v

    def expr(self) -> OrePoly:
        v = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> OrePoly:
        v = self.unary()
        while self.peek().text == "*":
            self.take()
            v = v * self.unary()
        return v

    def unary(self) -> OrePoly:
        t = self.peek()
        if t.text == "-":
            self.take()
            return -self.unary()
        if t.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def integer(self) -> int:
        t = self.peek()
        sign = 1
        if t.text == "(":
            self.take()
            k = self.integer()
            self.expect(")")
            return k
        if t.text in ("-", "+"):
            self.take()
            sign = -1 if t.text == "-" else 1
            t = self.peek()
        if t.kind != "num" or "/" in t.text:
            raise ParseError("expected an integer exponent", t.pos, self.text)
        self.take()
        return sign * int(t.text)

    def power(self) -> OrePoly:
        start = self.peek()
        base = self.atom()
        if self.peek().text != "^":
            return base
        self.take()
        k = self.integer()
        if k >= 0:
            return base ** k
        if base.deg_abs == 0 and len(base.terms) == 1:
            (d, a), = base.terms.items()
            if d == 0:
                return OrePoly(self.ctx, {0: a.inverse() ** (-k)})
            if a == 1:
                return OrePoly.sigma(self.ctx, d * k)
        raise ParseError("negative powers need a monomial base", start.pos, self.text)

    def atom(self) -> OrePoly:
        t = self.take()
        ctx = self.ctx
        if t.kind == "num":
            return OrePoly(ctx, {0: Fraction(t.text)})
        if t.kind == "name":
            if t.text == "z":
                return OrePoly(ctx, {0: LaurentSeries.monomial(ctx, 1, 1)})
            if t.text == "q":
                return OrePoly(ctx, {0: ctx.q})
            if t.text == "s":
                return OrePoly.sigma(ctx, 1)
            # O(z^n)
            self.expect("(")
            z = self.take()
            if z.text != "z":
                raise ParseError("expected z inside O(...)", z.pos, self.text)
            n = 1
            if self.peek().text == "^":
                self.take()
                n = self.integer()
            self.expect(")")
            return _BigO(ctx, n)
        if t.text == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos, self.text)


class _BigO(OrePoly):
    """Zero coefficient known modulo z**n; only meaningful inside a sum."""

    __slots__ = ("n",)

    def __init__(self, ctx: QContext, n: int):
        super().__init__(ctx, {})
        self.n = n

    def _coerce(self, other):
        return OrePoly._coerce(self, other)

    def __add__(self, other):
        return _with_prec(other, self.n, self.ctx)

    __radd__ = __add__

    def __mul__(self, other):
        return _BigO(self.ctx, self.n + _val_of(other))

    def __rmul__(self, other):
        return _BigO(self.ctx, self.n + _val_of(other))


def _val_of(x) -> int:
    if isinstance(x, OrePoly) and not x.is_zero():
        if x.hi != 0 or x.lo != 0:
            raise TypeError("O(z^n) multiplies only degree-0 terms")
        return int(x.v0)
    return 0


def _with_prec(P, n: int, ctx: QContext) -> OrePoly:
    if isinstance(P, _BigO):
        return _BigO(ctx, min(P.n, n))
    if not isinstance(P, OrePoly):
        P = OrePoly(ctx, {0: P})
    terms = dict(P.terms)
    a = terms.get(0, LaurentSeries.zero(ctx))
    return OrePoly(ctx, {**terms, 0: a.truncate(n)}) if not a.is_zero() else OrePoly(ctx, terms)


def parse(text: str, ctx: QContext | None = None) -> OrePoly:
    """Parse an operator expression into an OrePoly."""
    return _Parser(text, ctx or QContext()).parse()


def _fmt_scalar(c: Fraction) -> str:
    return str(c)


def _fmt_monomial(c: Fraction, e: int) -> str:
    """c z^e with c != 0, sign included."""
    zpart = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
    if not zpart:
        return _fmt_scalar(c)
    if c == 1:
        return zpart
    if c == -1:
        return "-" + zpart
    return f"{_fmt_scalar(c)}*{zpart}"


def format_series(a: LaurentSeries, show_precision: bool = False) -> str:
    parts = [_fmt_monomial(c, e) for e, c in a.terms()]
    if show_precision and not a.is_exact:
        parts.append(f"O(z^{a.prec})")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def format_operator(P: OrePoly, show_precision: bool = False) -> str:
    if P.is_zero():
        return "0"
    chunks = []
    for k in sorted(P.terms, reverse=True):
        a = P.terms[k]
        spart = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
        if spart.startswith("s^-"):
            spart = f"s^({k})"
        terms = list(a.terms())
        has_o = show_precision and not a.is_exact
        if len(terms) == 1 and not has_o:
            e, c = terms[0]
            if not spart:
                chunks.append(_fmt_monomial(c, e))
                continue
            if e == 0 and c in (1, -1):
                chunks.append(("-" if c == -1 else "") + spart)
            else:
                chunks.append(_fmt_monomial(c, e) + "*" + spart)
            continue
        neg = bool(terms) and terms[0][1] < 0
        body = format_series(-a if neg else a, show_precision)
        coeff = f"({body})"
        chunk = coeff if not spart else f"{coeff}*{spart}"
        chunks.append(("-" if neg else "") + chunk)
    out = chunks[0]
    for c in chunks[1:]:
        out += c if c.startswith("-") else "+" + c
    return out
