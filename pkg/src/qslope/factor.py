"""Series solutions, exponent peeling and slope factorizations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    InsufficientData,
    NonIntegralSlope,
    NotFirstSlope,
    PreconditionViolated,
    ResidualNonzero,
)
from .newton import ExponentData, exponents, newton_function
from .ore import GaugeSymbol, OrePoly, gauge, make_entire, right_divide
from .series import INF, LaurentSeries, scalar


class Mode(str, Enum):
    FORMAL = "formal"
    CONVERGENT = "convergent"


def as_mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(str(mode))


@dataclass(frozen=True)
class FirstOrderFactor:
    """(z**(-slope) sigma - c) * u**(-1) with u(0) = 1."""

    slope: int
    c: Fraction
    u: LaurentSeries

    def operator(self) -> OrePoly:
        ctx = self.u.ctx
        uinv = self.u.inverse()
        top = uinv.sigma(1).shift(-self.slope)
        return OrePoly(ctx, {1: top, 0: -(uinv.scale(self.c))})


@dataclass
class Factorization:
    """factors[0] * factors[1] * ... with per-factor twist series."""

    factors: list[OrePoly]
    twists: list[tuple[LaurentSeries, ...]]
    pieces: list[tuple[FirstOrderFactor, ...]] = field(default_factory=list)
    slopes: list = field(default_factory=list)
    residual: Fraction = Fraction(1)

    def product(self) -> OrePoly:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = out * f
        return out.left_scale(LaurentSeries.monomial(out.ctx, self.residual)) if self.residual != 1 else out

    @property
    def left(self) -> OrePoly:
        return self.factors[0]

    @property
    def right(self) -> OrePoly:
        out = OrePoly.one(self.factors[0].ctx)
        for f in self.factors[1:]:
            out = out * f
        return out

    def all_pieces(self) -> list[FirstOrderFactor]:
        return [p for group in self.pieces for p in group]


def _integral(mu) -> int:
    f = Fraction(mu)
    if f.denominator != 1:
        raise NonIntegralSlope(f"slope {mu} is not integral; ramify first")
    return int(f)


def _cauchy_bound(poly: dict[int, Fraction]) -> Fraction:
    k0 = min(poly)
    d = max(poly)
    lead = abs(poly[d])
    return 1 + max((abs(c) / lead for k, c in poly.items() if k != d), default=Fraction(0))


def series_solution(P: OrePoly, prec: int | None = None) -> LaurentSeries:
    """The unique f with f(0) = 1 and P.f = 0, for exponent 1 at slope 0."""
    ctx = P.ctx
    r = newton_function(P)
    if r(0) == 0:
        raise PreconditionViolated("0 is not a slope of the operator")
    v = P.v0
    # F_j(X) = sum_k a_{k, j+v} X^k, with a_k the coefficient of sigma^k
    N = prec if prec is not None else ctx.default_prec
    for a in P.terms.values():
        if a.prec != INF:
            N = min(N, int(a.prec) - v)
    if N < 1:
        raise PreconditionViolated("operator coefficients carry no precision at slope 0")
    slices: list[list[tuple[int, Fraction]]] = []
    for j in range(N):
        row = []
        for k, a in P.terms.items():
            c = a.get(j + v)
            if c:
                row.append((k, c))
        slices.append(row)
    F0 = {k: c for k, c in slices[0]}
    qp = ctx.qpow

    def ev(j: int, m: int) -> Fraction:
        s = Fraction(0)
        for k, c in slices[j]:
            s += c * qp(k * m)
        return s

    if ev(0, 0) != 0:
        raise PreconditionViolated("1 is not an exponent at slope 0")
    bound = _cauchy_bound(F0) if F0 else Fraction(0)
    aq = abs(ctx.q)
    lo = min(F0)
    m = 1
    while aq ** m <= bound:
        if sum((c * qp(k * m) for k, c in F0.items()), Fraction(0)) == 0:
            raise PreconditionViolated(f"exponent 1 is resonant (q^{m} is also an exponent)")
        m += 1
    f = [Fraction(1)]
    for l in range(1, N):
        s = Fraction(0)
        for mm in range(l):
            if f[mm]:
                e = ev(l - mm, mm)
                if e:
                    s += e * f[mm]
        f.append(-s / ev(0, l))
    return LaurentSeries._raw(ctx, f, 0, N)


def adams_quotient(P: OrePoly, u: LaurentSeries) -> OrePoly:
    """Closed form P_1 with P = P_1 (sigma - 1) u^{-1} whenever P.u = 0.

    P must have sigma-degrees 0..n.
    """
    ctx = P.ctx
    n = P.hi
    out = {}
    acc = LaurentSeries.zero(ctx)
    for j in range(n):
        acc = acc + P.coeff(j) * u.sigma(j)
        out[j] = -acc
    return OrePoly(ctx, out)


def _peel(P: OrePoly, mu: int, c: Fraction, m: int, prec: int | None, check: bool):
    ctx = P.ctx
    Pe, lo = make_entire(P)
    alpha = GaugeSymbol(c, mu)
    cur = gauge(Pe, alpha)
    pieces: list[FirstOrderFactor] = []
    for _ in range(m):
        w = series_solution(cur, prec)
        winv = w.inverse()
        D = OrePoly(ctx, {1: winv.sigma(1), 0: -winv})
        Q, R = right_divide(cur, D)
        if not R.is_zero():
            raise ResidualNonzero(f"nonzero remainder when peeling exponent {c} at slope {mu}")
        if check:
            Q2 = adams_quotient(cur, w)
            if not Q2 == Q:
                raise ResidualNonzero("division quotient disagrees with the closed-form quotient")
        pieces.insert(0, FirstOrderFactor(mu, c, w))
        cur = Q
    Q = gauge(cur, alpha.inverse()).left_scale(LaurentSeries.monomial(ctx, c ** (-m)))
    return Q.left_sigma(lo), pieces


def _find_exponent(exps: Sequence[ExponentData], c: Fraction) -> ExponentData:
    for e in exps:
        if e.c == c:
            return e
    raise PreconditionViolated(f"{c} is not an exponent")


def peel_exponent(
    P: OrePoly, mu, c, m: int = 1, prec: int | None = None, check: bool = True
) -> Factorization:
    """P = Q (z^{-mu} sigma - c) u_m^{-1} ... (z^{-mu} sigma - c) u_1^{-1}."""
    mu = _integral(mu)
    c = scalar(c)
    e = _find_exponent(exponents(P, mu), c)
    if e.resonant:
        raise PreconditionViolated(f"exponent {c} is resonant at slope {mu}")
    if e.multiplicity < m:
        raise PreconditionViolated(f"exponent {c} has multiplicity {e.multiplicity} < {m}")
    Q, pieces = _peel(P, mu, c, m, prec, check)
    return Factorization(
        factors=[Q] + [p.operator() for p in pieces],
        twists=[()] + [(p.u,) for p in pieces],
        pieces=[()] + [(p,) for p in pieces],
        slopes=[None] + [mu] * len(pieces),
    )


def peel_order(exps: Sequence[ExponentData], class_order: Callable | None = None) -> list[ExponentData]:
    """The order in which exponents are split off, first one ending rightmost.

    Classes modulo q^Z are taken in increasing cbar unless ``class_order``
    permutes the list of class representatives; inside a class the largest
    eps goes first so that each peeled exponent is non-resonant.
    """
    classes: dict[Fraction, list[ExponentData]] = {}
    for e in exps:
        classes.setdefault(e.cbar, []).append(e)
    keys = sorted(classes)
    if class_order is not None:
        keys = list(class_order(keys))
    out = []
    for k in keys:
        out.extend(sorted(classes[k], key=lambda e: -e.eps))
    return out


def factor_slope(
    P: OrePoly,
    mu,
    mode=Mode.FORMAL,
    prec: int | None = None,
    class_order: Callable | None = None,
    check: bool = True,
) -> Factorization:
    """P = Q * R with R pure of slope mu built from first-order factors."""
    mode = as_mode(mode)
    mu = _integral(mu)
    r = newton_function(P)
    if r(mu) == 0:
        raise PreconditionViolated(f"{mu} is not a slope of the operator")
    if mode is Mode.CONVERGENT and Fraction(mu) != r.first_slope:
        raise NotFirstSlope(f"convergent factorization must start at slope {r.first_slope}, not {mu}")
    exps = exponents(P, mu)
    cur = P
    pieces: list[FirstOrderFactor] = []
    for e in peel_order(exps, class_order):
        # Peeling c = cbar q^eps equals gauging by cbar z^mu and then by the
        # shift u = z^eps, which moves the top of the class to exponent 1.
        cur, new = _peel(cur, mu, e.c, e.multiplicity, prec, check)
        pieces = new + pieces
    return Factorization(
        factors=[cur] + [p.operator() for p in pieces],
        twists=[()] + [(p.u,) for p in pieces],
        pieces=[()] + [(p,) for p in pieces],
        slopes=[None] + [mu] * len(pieces),
    )


def _product(ops: Sequence[OrePoly], ctx) -> OrePoly:
    out = OrePoly.one(ctx)
    for op in ops:
        out = out * op
    return out


def birkhoff_guenther(
    P: OrePoly, mode=Mode.CONVERGENT, prec: int | None = None, class_order: Callable | None = None
) -> Factorization:
    """P = R_{mu_1} ... R_{mu_k}, slopes strictly decreasing left to right."""
    mode = as_mode(mode)
    r = newton_function(P)
    if not r.is_integral():
        raise NonIntegralSlope("non-integral slopes; ramify first")
    factors: list[OrePoly] = []
    twists: list[tuple] = []
    pieces: list[tuple] = []
    slopes: list = []
    cur = P
    while len(newton_function(cur).support) > 1:
        mu = int(newton_function(cur).first_slope)
        fac = factor_slope(cur, mu, mode, prec, class_order)
        group = tuple(fac.all_pieces())
        factors.insert(0, _product([p.operator() for p in group], P.ctx))
        twists.insert(0, tuple(p.u for p in group))
        pieces.insert(0, group)
        slopes.insert(0, mu)
        cur = fac.left
    factors.insert(0, cur)
    twists.insert(0, ())
    pieces.insert(0, ())
    slopes.insert(0, int(newton_function(cur).first_slope) if cur.deg_abs > 0 else None)
    return Factorization(factors, twists, pieces, slopes)


def first_order_factorization(
    P: OrePoly, mode=Mode.FORMAL, prec: int | None = None, class_order: Callable | None = None
) -> tuple[OrePoly, list[FirstOrderFactor]]:
    """(a, [F_n, ..., F_1]) with P = a F_n ... F_1 and a of absolute degree 0."""
    mode = as_mode(mode)
    cur = P
    pieces: list[FirstOrderFactor] = []
    while cur.deg_abs > 0:
        r = newton_function(cur)
        if not r.is_integral():
            raise NonIntegralSlope("non-integral slopes; ramify first")
        fac = factor_slope(cur, int(r.first_slope), mode, prec, class_order)
        pieces = fac.all_pieces() + pieces
        cur = fac.left
    return cur, pieces


def formal_pure_parts(P: OrePoly, prec: int | None = None) -> list[OrePoly]:
    """One pure operator per slope, in decreasing slope order."""
    r = newton_function(P)
    if not r.is_integral():
        raise NonIntegralSlope("non-integral slopes; ramify first")
    parts = []
    for mu in r.slopes:
        cur = P
        for nu in sorted(r.slopes):
            if nu != mu:
                cur = factor_slope(cur, int(nu), Mode.FORMAL, prec).left
        parts.append(cur)
    return parts


@dataclass(frozen=True)
class GrowthClass:
    kind: str
    rate: float
    quadratic: float
    linear: float
    samples: int


Q_EXPONENTIAL = "q-exponential"
GEOMETRIC = "geometric"


def growth_class(f: LaurentSeries, threshold: float = 0.05) -> GrowthClass:
    """Fit log|f_k| by a quadratic in k.

    ``quadratic`` is the k**2 coefficient in units of log|q|; it is 1/2 for
    the q-Euler series.  Above ``threshold`` the growth is q-exponential.
    """
    import numpy as np

    if f.prec == INF:
        return GrowthClass(GEOMETRIC, 0.0, 0.0, 0.0, len(f.coeffs))
    start = min(f.val, 0) if f.coeffs else 0
    if f.prec - start < 16:
        raise InsufficientData(f"growth classification needs 16 known coefficients, got {f.prec - start}")
    ks, ys = [], []
    for k, c in f.terms():
        ks.append(float(k))
        ys.append(math.log(abs(c.numerator)) - math.log(c.denominator))
    if len(ks) < 3:
        return GrowthClass(GEOMETRIC, 0.0, 0.0, 0.0, len(ks))
    lq = math.log(abs(f.ctx.q.numerator)) - math.log(f.ctx.q.denominator)
    a, b, _ = np.polyfit(np.array(ks), np.array(ys), 2)
    quad = float(a) / lq
    if quad > threshold:
        return GrowthClass(Q_EXPONENTIAL, quad, quad, float(b), len(ks))
    b1, _ = np.polyfit(np.array(ks), np.array(ys), 1)
    return GrowthClass(GEOMETRIC, float(math.exp(b1)), quad, float(b1), len(ks))
