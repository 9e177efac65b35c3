"""Laurent polynomials in sigma over truncated Laurent series.

An :class:`OrePoly` stores ``{k: a_k}`` for ``sum a_k sigma**k``, with the
single commutation rule ``sigma**k * x = sigma_q**k(x) * sigma**k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .errors import ContextMismatch, DivisionByZeroOperator, ZeroOperator
from .series import INF, LaurentSeries, QContext, ScalarLike, scalar

Coefficient = Union[LaurentSeries, int, Fraction]


class OrePoly:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: QContext, terms: Mapping[int, Coefficient] | None = None):
        self.ctx = ctx
        clean: dict[int, LaurentSeries] = {}
        for k, a in (terms or {}).items():
            if not isinstance(a, LaurentSeries):
                a = LaurentSeries.monomial(ctx, a, 0) if a != 0 else LaurentSeries.zero(ctx)
            elif not ctx.compatible(a.ctx):
                raise ContextMismatch("coefficient from a different q-context")
            if not a.is_zero():
                clean[int(k)] = a
        self.terms = dict(sorted(clean.items()))

    # constructors ---------------------------------------------------------
    @classmethod
    def sigma(cls, ctx: QContext, k: int = 1) -> "OrePoly":
        return cls(ctx, {k: 1})

    @classmethod
    def scalar(cls, ctx: QContext, a: Coefficient) -> "OrePoly":
        return cls(ctx, {0: a})

    @classmethod
    def one(cls, ctx: QContext) -> "OrePoly":
        return cls(ctx, {0: 1})

    @classmethod
    def from_lists(cls, ctx: QContext, coeffs: Mapping[int, Mapping[int, ScalarLike]]) -> "OrePoly":
        """Build from ``{sigma_degree: {z_exponent: rational}}``."""
        return cls(ctx, {k: LaurentSeries.from_dict(ctx, v) for k, v in coeffs.items()})

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def _need_nonzero(self) -> None:
        if not self.terms:
            raise ZeroOperator("operation undefined on the zero operator")

    @property
    def lo(self) -> int:
        self._need_nonzero()
        return next(iter(self.terms))

    @property
    def hi(self) -> int:
        self._need_nonzero()
        return next(reversed(self.terms))

    @property
    def deg_abs(self) -> int | float:
        if not self.terms:
            return -math.inf
        return self.hi - self.lo

    @property
    def v0(self) -> int | float:
        if not self.terms:
            return math.inf
        return min(a.val for a in self.terms.values())

    def coeff(self, k: int) -> LaurentSeries:
        a = self.terms.get(k)
        return a if a is not None else LaurentSeries.zero(self.ctx)

    def items(self) -> Iterator[tuple[int, LaurentSeries]]:
        return iter(self.terms.items())

    def is_exact(self) -> bool:
        return all(a.is_exact for a in self.terms.values())

    def prec(self):
        """Smallest absolute precision among the coefficients."""
        return min((a.prec for a in self.terms.values()), default=INF)

    def is_entire(self) -> bool:
        return bool(self.terms) and self.lo == 0

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "OrePoly":
        if isinstance(other, OrePoly):
            if not self.ctx.compatible(other.ctx):
                raise ContextMismatch("operators live in different q-contexts")
            return other
        if isinstance(other, (LaurentSeries, int, Fraction)):
            return OrePoly(self.ctx, {0: other})
        return NotImplemented

    def __add__(self, other) -> "OrePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out[k] + a if k in out else a
        return OrePoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "OrePoly":
        return OrePoly(self.ctx, {k: -a for k, a in self.terms.items()})

    def __sub__(self, other) -> "OrePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "OrePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "OrePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ore_mul(self, other)

    def __rmul__(self, other) -> "OrePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ore_mul(other, self)

    def __pow__(self, k: int) -> "OrePoly":
        if k < 0:
            raise ValueError("negative powers of operators are not defined")
        out = OrePoly.one(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def left_sigma(self, s: int) -> "OrePoly":
        """sigma**s * self."""
        if s == 0:
            return self
        return OrePoly(self.ctx, {k + s: a.sigma(s) for k, a in self.terms.items()})

    def right_sigma(self, s: int) -> "OrePoly":
        """self * sigma**s."""
        if s == 0:
            return self
        return OrePoly(self.ctx, {k + s: a for k, a in self.terms.items()})

    def left_scale(self, a: Coefficient) -> "OrePoly":
        """a * self for a degree-0 coefficient a."""
        return OrePoly(self.ctx, {k: c * a for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, (LaurentSeries, int, Fraction)):
            other = OrePoly(self.ctx, {0: other})
        if not isinstance(other, OrePoly):
            return NotImplemented
        for k in set(self.terms) | set(other.terms):
            if not self.coeff(k) == other.coeff(k):
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        from .exprs import format_operator

        try:
            return f"OrePoly({format_operator(self, show_precision=True)})"
        except Exception:  # pragma: no cover - repr must never fail
            return f"OrePoly({self.terms!r})"


def ore_mul(P: OrePoly, Q: OrePoly) -> OrePoly:
    out: dict[int, LaurentSeries] = {}
    for i, a in P.terms.items():
        for j, b in Q.terms.items():
            t = a * b.sigma(i)
            k = i + j
            out[k] = out[k] + t if k in out else t
    return OrePoly(P.ctx, out)


def _entire_divide(P: OrePoly, D: OrePoly) -> tuple[OrePoly, OrePoly]:
    """Division for P with degrees >= 0 and D with degrees 0..n."""
    n = D.hi
    lead = D.terms[n]
    lead_inv: dict[int, LaurentSeries] = {}
    rem = dict(P.terms)
    quot: dict[int, LaurentSeries] = {}
    while rem:
        top = max(rem)
        if top < n:
            break
        s = top - n
        if s not in lead_inv:
            lead_inv[s] = lead.sigma(s).inverse()
        t = rem.pop(top) * lead_inv[s]
        quot[s] = t
        for j, d in D.terms.items():
            if j == n:
                continue
            k = j + s
            v = t * d.sigma(s)
            r = rem[k] - v if k in rem else -v
            if r.is_zero():
                rem.pop(k, None)
            else:
                rem[k] = r
    return OrePoly(P.ctx, quot), OrePoly(P.ctx, rem)


def right_divide(P: OrePoly, D: OrePoly) -> tuple[OrePoly, OrePoly]:
    """Return (Q, R) with P = Q*D + R and deg_abs(R) < deg_abs(D)."""
    if D.is_zero():
        raise DivisionByZeroOperator("right division by the zero operator")
    if P.is_zero():
        return OrePoly(P.ctx), OrePoly(P.ctx)
    lo = D.lo
    De = D.right_sigma(-lo)
    P1 = P.right_sigma(-lo)
    s = max(0, -P1.lo)
    P2 = P1.left_sigma(s)
    Q2, R2 = _entire_divide(P2, De)
    Q = Q2.left_sigma(-s)
    R = R2.left_sigma(-s).right_sigma(lo)
    return Q, R


def left_normalizer(P: OrePoly) -> tuple[LaurentSeries, int]:
    """(a, k) such that a * sigma**k * P is entire with leading coefficient 1."""
    if P.is_zero():
        raise ZeroOperator("cannot normalize the zero operator")
    k = -P.lo
    lead = P.terms[P.hi].sigma(k)
    return lead.inverse(), k


def normalize(P: OrePoly) -> OrePoly:
    a, k = left_normalizer(P)
    return P.left_sigma(k).left_scale(a)


def make_entire(P: OrePoly) -> tuple[OrePoly, int]:
    """(sigma**(-lo) * P, lo)."""
    lo = P.lo
    return P.left_sigma(-lo), lo


@dataclass(frozen=True)
class GaugeSymbol:
    """alpha = c * z**mu, standing for any u with sigma_q(u) = alpha * u."""

    c: Fraction
    mu: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", scalar(self.c))
        if self.c == 0:
            raise ValueError("gauge constant must be nonzero")
        object.__setattr__(self, "mu", int(self.mu))

    def pi(self, k: int, ctx: QContext) -> LaurentSeries:
        """sigma_q**k(u)/u = c**k z**(k mu) q**(mu k (k-1)/2)."""
        e = self.mu * k * (k - 1) // 2
        return LaurentSeries.monomial(ctx, self.c ** k * ctx.qpow(e), k * self.mu)

    def __mul__(self, other: "GaugeSymbol") -> "GaugeSymbol":
        return GaugeSymbol(self.c * other.c, self.mu + other.mu)

    def inverse(self) -> "GaugeSymbol":
        return GaugeSymbol(1 / self.c, -self.mu)


def gauge(P: OrePoly, alpha: GaugeSymbol) -> OrePoly:
    """u^{-1} P u."""
    return OrePoly(P.ctx, {k: a * alpha.pi(k, P.ctx) for k, a in P.terms.items()})


def ramify_ore(P: OrePoly, l: int) -> OrePoly:
    ctx = P.ctx.ramified(l)
    return OrePoly(ctx, {k: a.ramify(l) for k, a in P.terms.items()})


def apply(P: OrePoly, f: LaurentSeries) -> LaurentSeries:
    """P.f = sum a_k sigma_q**k(f)."""
    out = LaurentSeries.zero(P.ctx)
    for k, a in P.terms.items():
        out = out + a * f.sigma(k)
    return out


def as_operator(ctx: QContext, x) -> OrePoly:
    if isinstance(x, OrePoly):
        return x
    return OrePoly(ctx, {0: x})
