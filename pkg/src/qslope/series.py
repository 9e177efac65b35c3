"""Exact scalars in a q-context and truncated Laurent series over them.

A :class:`LaurentSeries` is known modulo ``z**prec``.  Exact Laurent
polynomials use ``prec = INF`` so that operators written with polynomial
coefficients never lose information.  Operations that would produce an
infinite expansion from exact input (inverting ``1 - z`` say) truncate at
``ctx.default_prec`` terms past the leading one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    ContextMismatch,
    DivisionByZeroSeries,
    ExactRootUnavailable,
    InsufficientPrecision,
    NonzeroConstantTerm,
    PreconditionViolated,
    ZeroScalar,
)

INF = math.inf
ScalarLike = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def scalar(x: ScalarLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _log_abs(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


@dataclass(frozen=True)
class QContext:
    """The base q = qbase**qexp together with a default truncation order.

    ``level`` records how many times the variable has been ramified: series
    built in a context of level l are series in z_l with z = z_l**l.
    """

    qbase: Fraction = Fraction(2)
    qexp: int = 1
    default_prec: int = 32
    level: int = 1
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "qbase", scalar(self.qbase))
        if self.qexp < 1:
            raise ValueError("qexp must be a positive integer")
        if self.default_prec < 1:
            raise ValueError("default_prec must be positive")
        if abs(self.q) <= 1:
            raise ValueError("|q| must exceed 1")

    @property
    def q(self) -> Fraction:
        q = self._cache.get("q")
        if q is None:
            q = self.qbase ** self.qexp
            self._cache["q"] = q
        return q

    def qpow(self, k: int) -> Fraction:
        key = ("p", k)
        v = self._cache.get(key)
        if v is None:
            v = self.q ** k
            self._cache[key] = v
        return v

    def compatible(self, other: "QContext") -> bool:
        return self is other or (self.q == other.q and self.level == other.level)

    def with_prec(self, prec: int) -> "QContext":
        return QContext(self.qbase, self.qexp, prec, self.level)

    def ramified(self, l: int) -> "QContext":
        if l < 1:
            raise ValueError("ramification index must be positive")
        if self.qexp % l:
            raise ExactRootUnavailable(
                f"q = {self.qbase}^{self.qexp} has no exact {l}-th root in this context"
            )
        return QContext(self.qbase, self.qexp // l, self.default_prec, self.level * l)

    def in_qZ(self, c: Fraction) -> int | None:
        """Return l with c = q**l, or None."""
        eps, cbar = decompose(c, self)
        return eps if cbar == 1 else None


def decompose(c: ScalarLike, ctx: QContext) -> tuple[int, Fraction]:
    """Split c = q**eps * cbar with 1 <= |cbar| < |q|."""
    c = scalar(c)
    if c == 0:
        raise ZeroScalar("cannot decompose 0")
    aq = abs(ctx.q)
    eps = math.floor(_log_abs(c) / _log_abs(ctx.q))
    ac = abs(c)
    while ac < aq ** eps:
        eps -= 1
    while ac >= aq ** (eps + 1):
        eps += 1
    return eps, c / ctx.qpow(eps)


def _integer_parts(cs: Sequence[Fraction]) -> tuple[list[int], int]:
    d = 1
    for c in cs:
        d = math.lcm(d, c.denominator)
    return [c.numerator * (d // c.denominator) for c in cs], d


def _convolve(ac: Sequence[Fraction], bc: Sequence[Fraction], n: int) -> list[Fraction]:
    """First n coefficients of the product, convolved over a common denominator."""
    ai, da = _integer_parts(ac[:n])
    bi, db = _integer_parts(bc[:n])
    if len(ai) > len(bi):
        ai, bi = bi, ai
    out = [0] * n
    lb = len(bi)
    for i, x in enumerate(ai):
        if not x:
            continue
        for j in range(min(lb, n - i)):
            y = bi[j]
            if y:
                out[i + j] += x * y
    d = da * db
    return [Fraction(v, d) if v else _ZERO for v in out]


class LaurentSeries:
    """A z-adic Laurent series known modulo z**prec.

    ``coeffs[i]`` is the coefficient of ``z**(val + i)``.  Leading and
    trailing zeros are stripped, so a zero series has empty ``coeffs``; its
    ``val`` is then the lower bound ``prec``.
    """

    __slots__ = ("ctx", "val", "coeffs", "prec")

    def __init__(
        self,
        ctx: QContext,
        coeffs: Iterable[ScalarLike] = (),
        val: int = 0,
        prec: float | int = INF,
    ):
        cs = [scalar(c) for c in coeffs]
        if prec != INF:
            prec = int(prec)
            keep = max(0, prec - val)
            del cs[keep:]
        self._set(ctx, cs, val, prec)

    def _set(self, ctx: QContext, cs: list, val: int, prec) -> None:
        lo = 0
        n = len(cs)
        while lo < n and cs[lo] == 0:
            lo += 1
        hi = n
        while hi > lo and cs[hi - 1] == 0:
            hi -= 1
        self.ctx = ctx
        self.prec = prec
        if lo == hi:
            self.coeffs = ()
            self.val = prec
        else:
            self.coeffs = tuple(cs[lo:hi])
            self.val = val + lo

    @classmethod
    def _raw(cls, ctx: QContext, cs: list, val: int, prec) -> "LaurentSeries":
        obj = cls.__new__(cls)
        if prec != INF:
            keep = max(0, prec - val)
            del cs[keep:]
        obj._set(ctx, cs, val, prec)
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def from_dict(cls, ctx: QContext, terms: Mapping[int, ScalarLike], prec=INF) -> "LaurentSeries":
        items = {k: scalar(v) for k, v in terms.items() if v != 0}
        if not items:
            return cls(ctx, (), 0, prec)
        lo, hi = min(items), max(items)
        cs = [items.get(k, _ZERO) for k in range(lo, hi + 1)]
        return cls(ctx, cs, lo, prec)

    @classmethod
    def monomial(cls, ctx: QContext, c: ScalarLike, k: int = 0) -> "LaurentSeries":
        return cls(ctx, (c,), k)

    @classmethod
    def zero(cls, ctx: QContext, prec=INF) -> "LaurentSeries":
        return cls(ctx, (), 0, prec)

    @classmethod
    def one(cls, ctx: QContext) -> "LaurentSeries":
        return cls(ctx, (1,), 0)

    # basic queries --------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.prec == INF

    def is_zero(self) -> bool:
        """Zero to the known precision."""
        return not self.coeffs

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __getitem__(self, k: int) -> Fraction:
        if k >= self.prec:
            raise InsufficientPrecision(f"coefficient of z^{k} lies beyond precision {self.prec}")
        i = k - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _ZERO

    def get(self, k: int) -> Fraction:
        """Like indexing but returns 0 beyond the precision."""
        i = k - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _ZERO

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            raise InsufficientPrecision("series is zero to precision")
        return self.coeffs[0]

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.val + i, c

    def constant_term(self) -> Fraction:
        return self[0]

    def degree(self) -> int:
        """Largest exponent with a stored nonzero coefficient."""
        if not self.coeffs:
            raise InsufficientPrecision("series is zero to precision")
        return self.val + len(self.coeffs) - 1

    def relative_prec(self):
        return self.prec - self.val

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if not self.ctx.compatible(other.ctx):
                raise ContextMismatch("series live in different q-contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentSeries(self.ctx, (other,), 0)
        return NotImplemented

    def __add__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if not other.coeffs:
            return self if prec == self.prec else self.truncate(prec)
        if not self.coeffs:
            return other if prec == other.prec else other.truncate(prec)
        lo = min(self.val, other.val)
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return LaurentSeries(self.ctx, (), 0, prec)
        cs = [_ZERO] * (hi - lo)
        for src in (self, other):
            off = src.val - lo
            for i, c in enumerate(src.coeffs):
                j = off + i
                if j >= len(cs):
                    break
                cs[j] += c
        return LaurentSeries._raw(self.ctx, cs, lo, prec)

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries._raw(self.ctx, [-c for c in self.coeffs], self.val, self.prec)

    def __sub__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scale(self, c: ScalarLike) -> "LaurentSeries":
        c = scalar(c)
        if c == 0:
            return LaurentSeries.zero(self.ctx)
        return LaurentSeries._raw(self.ctx, [c * x for x in self.coeffs], self.val, self.prec)

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        if (not a.coeffs and a.is_exact) or (not b.coeffs and b.is_exact):
            return LaurentSeries.zero(self.ctx)
        prec = min(a.prec + b.val, b.prec + a.val)
        if not a.coeffs or not b.coeffs:
            return LaurentSeries(self.ctx, (), 0, prec)
        lo = a.val + b.val
        n = len(a.coeffs) + len(b.coeffs) - 1
        if prec != INF:
            n = min(n, prec - lo)
        if n <= 0:
            return LaurentSeries(self.ctx, (), 0, prec)
        return LaurentSeries._raw(self.ctx, _convolve(a.coeffs, b.coeffs, n), lo, prec)

    __rmul__ = __mul__

    def inverse(self, rel_prec: int | None = None) -> "LaurentSeries":
        if not self.coeffs:
            raise DivisionByZeroSeries("series is zero to precision")
        v = self.val
        c0 = self.coeffs[0]
        if self.is_exact and len(self.coeffs) == 1:
            return LaurentSeries._raw(self.ctx, [1 / c0], -v, INF)
        rel = self.prec - v if not self.is_exact else (rel_prec or self.ctx.default_prec)
        rel = int(rel)
        inv0 = 1 / c0
        a = self.coeffs
        la = len(a)
        b = [inv0]
        for k in range(1, rel):
            s = _ZERO
            for j in range(1, min(k, la - 1) + 1):
                aj = a[j]
                if aj:
                    s += aj * b[k - j]
            b.append(-s * inv0)
        return LaurentSeries._raw(self.ctx, b, -v, -v + rel)

    def __truediv__(self, other) -> "LaurentSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroSeries("division by the zero scalar")
            return self.scale(1 / scalar(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> "LaurentSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentSeries.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z**k."""
        obj = LaurentSeries.__new__(LaurentSeries)
        obj.ctx = self.ctx
        obj.coeffs = self.coeffs
        obj.prec = self.prec + k
        obj.val = self.val + k
        return obj

    def sigma(self, k: int = 1) -> "LaurentSeries":
        """sigma_q**k : f(z) -> f(q**k z)."""
        if k == 0 or not self.coeffs:
            return self
        qp = self.ctx.qpow
        v = self.val
        cs = [c * qp(k * (v + i)) if c else c for i, c in enumerate(self.coeffs)]
        return LaurentSeries._raw(self.ctx, cs, v, self.prec)

    def truncate(self, prec) -> "LaurentSeries":
        if prec >= self.prec:
            return self
        return LaurentSeries(self.ctx, self.coeffs, self.val, prec)

    def ramify(self, l: int) -> "LaurentSeries":
        ctx = self.ctx.ramified(l)
        if l == 1:
            return LaurentSeries._raw(ctx, list(self.coeffs), self.val, self.prec)
        cs: list = []
        for i, c in enumerate(self.coeffs):
            if i:
                cs.extend([_ZERO] * (l - 1))
            cs.append(c)
        prec = self.prec * l if self.prec != INF else INF
        val = self.val * l if self.coeffs else 0
        return LaurentSeries._raw(ctx, cs, val, prec)

    def map_coeffs(self, fn) -> "LaurentSeries":
        """Apply fn(k, c) to every stored coefficient."""
        cs = [fn(self.val + i, c) for i, c in enumerate(self.coeffs)]
        return LaurentSeries._raw(self.ctx, cs, self.val, self.prec)

    # comparison -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentSeries(self.ctx, (other,), 0)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        p = min(self.prec, other.prec)
        if p == INF:
            return self.val == other.val and self.coeffs == other.coeffs or (
                not self.coeffs and not other.coeffs
            )
        lo = min(self.val, other.val)
        for k in range(lo, int(p)):
            if self.get(k) != other.get(k):
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        parts = []
        for k, c in self.terms():
            parts.append(f"{c}*z^{k}" if k else f"{c}")
        body = " + ".join(parts) if parts else "0"
        if self.is_exact:
            return f"LaurentSeries({body})"
        return f"LaurentSeries({body} + O(z^{self.prec}))"


def sigma_pow(f: LaurentSeries, k: int) -> LaurentSeries:
    return f.sigma(k)


def q_integrate_series(g: LaurentSeries) -> LaurentSeries:
    """The inverse of sigma_q - 1 on series with zero constant term."""
    if g.prec <= 0:
        raise InsufficientPrecision("constant term of the integrand is unknown")
    if g.get(0) != 0:
        raise NonzeroConstantTerm("q-integration needs a zero constant term")
    qp = g.ctx.qpow
    return g.map_coeffs(lambda k, c: c / (qp(k) - 1) if c else c)


def solve_unit_twist(beta: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """The unit v with v(0) = 1 and sigma_q(v) = beta * v."""
    ctx = beta.ctx
    if beta.prec <= 0 or beta.val < 0 or beta.get(0) != 1:
        raise PreconditionViolated("solve_unit_twist needs beta(0) = 1")
    n = prec if prec is not None else ctx.default_prec
    if beta.prec != INF:
        n = min(n, int(beta.prec))
    qp = ctx.qpow
    v = [_ONE]
    for m in range(1, n):
        s = _ZERO
        for j in range(m):
            b = beta.get(m - j)
            if b:
                s += b * v[j]
        v.append(s / (qp(m) - 1))
    return LaurentSeries._raw(ctx, v, 0, n)


def ramify_series(f: LaurentSeries, l: int) -> LaurentSeries:
    return f.ramify(l)


def series(ctx: QContext, terms: Mapping[int, ScalarLike] | Sequence[ScalarLike], prec=INF) -> LaurentSeries:
    """Convenience constructor from a {exponent: coefficient} map or a list."""
    if isinstance(terms, Mapping):
        return LaurentSeries.from_dict(ctx, terms, prec)
    return LaurentSeries(ctx, terms, 0, prec)
