"""Newton functions, characteristic equations and exponents."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import IrrationalExponent, NonIntegralSlope, ZeroOperator
from .ore import GaugeSymbol, OrePoly, gauge
from .series import QContext, decompose, scalar


@dataclass(frozen=True)
class NewtonFunction:
    """Finitely supported map slope -> multiplicity, slopes decreasing."""

    support: tuple[tuple[Fraction, int], ...] = ()

    @classmethod
    def from_mapping(cls, m: Mapping) -> "NewtonFunction":
        acc: dict[Fraction, int] = defaultdict(int)
        for mu, r in m.items():
            acc[Fraction(mu)] += int(r)
        items = tuple(sorted(((mu, r) for mu, r in acc.items() if r), reverse=True))
        for _, r in items:
            if r < 0:
                raise ValueError("multiplicities must be positive")
        return cls(items)

    @classmethod
    def delta(cls, mu, r: int = 1) -> "NewtonFunction":
        return cls.from_mapping({mu: r})

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.support)

    def __call__(self, mu) -> int:
        return self.as_dict().get(Fraction(mu), 0)

    @property
    def slopes(self) -> list[Fraction]:
        return [mu for mu, _ in self.support]

    @property
    def mass(self) -> int:
        return sum(r for _, r in self.support)

    @property
    def first_slope(self) -> Fraction:
        return self.support[-1][0]

    @property
    def last_slope(self) -> Fraction:
        return self.support[0][0]

    def is_pure(self) -> bool:
        return len(self.support) <= 1

    def is_fuchsian(self) -> bool:
        return all(mu == 0 for mu, _ in self.support)

    def is_integral(self) -> bool:
        return all(mu.denominator == 1 for mu, _ in self.support)

    def __add__(self, other: "NewtonFunction") -> "NewtonFunction":
        return nf_add(self, other)

    def shift(self, t) -> "NewtonFunction":
        return NewtonFunction.from_mapping({mu + t: r for mu, r in self.support})

    def scale(self, l: int) -> "NewtonFunction":
        return NewtonFunction.from_mapping({mu * l: r for mu, r in self.support})

    def __str__(self) -> str:
        return "{" + ", ".join(f"{mu}: {r}" for mu, r in self.support) + "}"


def nf_add(r1: NewtonFunction, r2: NewtonFunction) -> NewtonFunction:
    acc = r1.as_dict()
    for mu, r in r2.support:
        acc[mu] = acc.get(mu, 0) + r
    return NewtonFunction.from_mapping(acc)


def nf_convolve(r1: NewtonFunction, r2: NewtonFunction) -> NewtonFunction:
    acc: dict[Fraction, int] = defaultdict(int)
    for m1, a in r1.support:
        for m2, b in r2.support:
            acc[m1 + m2] += a * b
    return NewtonFunction.from_mapping(acc)


def nf_reflect(r: NewtonFunction) -> NewtonFunction:
    return NewtonFunction.from_mapping({-mu: m for mu, m in r.support})


def lower_hull(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Lower convex hull of lattice points, left to right."""
    pts = sorted(set(points))
    # keep only the lowest point per abscissa
    best: dict[int, int] = {}
    for x, y in pts:
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            cross = (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox)
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_points(P: OrePoly) -> list[tuple[int, int]]:
    """Points (i, v0(a_i)) with a_i the coefficient of sigma**(n-i)."""
    if P.is_zero():
        raise ZeroOperator("the zero operator has no Newton polygon")
    hi = P.hi
    return [(hi - k, a.val) for k, a in P.terms.items()]


def newton_function(P: OrePoly) -> NewtonFunction:
    hull = lower_hull(newton_points(P))
    acc: dict[Fraction, int] = {}
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        mu = Fraction(y1 - y0, x1 - x0)
        acc[mu] = acc.get(mu, 0) + (x1 - x0)
    return NewtonFunction.from_mapping(acc)


def polygon_vertices(r: NewtonFunction, anchor: tuple[int, int] = (0, 0)) -> list[tuple[Fraction, Fraction]]:
    """Walk the slopes in stored (decreasing) order from the anchor."""
    x, y = Fraction(anchor[0]), Fraction(anchor[1])
    out = [(x, y)]
    for mu, m in r.support:
        x += m
        y += mu * m
        out.append((x, y))
    return out


def slopes_from_vertices(vertices: Sequence[tuple]) -> NewtonFunction:
    acc: dict[Fraction, int] = {}
    for (x0, y0), (x1, y1) in zip(vertices, vertices[1:]):
        dx = x1 - x0
        mu = Fraction(y1 - y0) / dx
        acc[mu] = acc.get(mu, 0) + int(dx)
    return NewtonFunction.from_mapping(acc)


@dataclass(frozen=True)
class CharEquation:
    """Commutative Laurent polynomial sum c_k X**k attached to a slope."""

    coeffs: tuple[tuple[int, Fraction], ...]
    slope: Fraction

    @classmethod
    def from_mapping(cls, m: Mapping[int, Fraction], slope) -> "CharEquation":
        items = tuple(sorted((int(k), scalar(v)) for k, v in m.items() if v != 0))
        return cls(items, Fraction(slope))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    @property
    def degree_abs(self) -> int:
        if not self.coeffs:
            return -1
        return self.coeffs[-1][0] - self.coeffs[0][0]

    def __call__(self, x) -> Fraction:
        x = scalar(x)
        return sum((c * x ** k for k, c in self.coeffs), Fraction(0))

    def normalized(self) -> "CharEquation":
        """Shift the lowest exponent to 0 and make the result monic."""
        if not self.coeffs:
            return self
        k0 = self.coeffs[0][0]
        lead = self.coeffs[-1][1]
        return CharEquation(tuple((k - k0, c / lead) for k, c in self.coeffs), self.slope)

    def polynomial(self) -> list[Fraction]:
        """Coefficients of the normalized polynomial, constant term first."""
        n = self.normalized()
        d = n.as_dict()
        return [d.get(k, Fraction(0)) for k in range(n.degree_abs + 1)]

    def __mul__(self, other: "CharEquation") -> "CharEquation":
        acc: dict[int, Fraction] = defaultdict(Fraction)
        for i, a in self.coeffs:
            for j, b in other.coeffs:
                acc[i + j] += a * b
        return CharEquation.from_mapping(acc, self.slope)

    def rescale(self, t) -> "CharEquation":
        """X -> t X."""
        t = scalar(t)
        return CharEquation(tuple((k, c * t ** k) for k, c in self.coeffs), self.slope)

    def equivalent(self, other: "CharEquation") -> bool:
        """Equality up to a unit monomial alpha X**k."""
        return self.normalized().coeffs == other.normalized().coeffs

    def __str__(self) -> str:
        return " + ".join(f"({c})*X^{k}" for k, c in reversed(self.coeffs)) or "0"


def _integral_slope(mu) -> int:
    f = Fraction(mu)
    if f.denominator != 1:
        raise NonIntegralSlope(f"slope {mu} is not integral; ramify first")
    return int(f)


def gauged_valuation(P: OrePoly, mu) -> int:
    """v0 of P gauged to slope 0 at mu, the z-power divided out of the characteristic equation."""
    return int(gauge(P, GaugeSymbol(1, _integral_slope(mu))).v0)


def char_of_product(P1: OrePoly, P2: OrePoly, mu) -> CharEquation:
    """The characteristic equation of P1 P2 predicted from the factors.

    Passing sigma^i over the z^v of the gauged right factor costs q^(i v), so
    the left equation is evaluated at q^v X.
    """
    v = gauged_valuation(P2, mu)
    return char_equation(P1, mu).rescale(P1.ctx.qpow(v)) * char_equation(P2, mu)


def char_equation(P: OrePoly, mu) -> CharEquation:
    m = _integral_slope(mu)
    if P.is_zero():
        raise ZeroOperator("the zero operator has no characteristic equation")
    G = gauge(P, GaugeSymbol(1, m))
    v = G.v0
    out = {}
    for k, a in G.terms.items():
        if a.val == v:
            out[k] = a.leading
    return CharEquation.from_mapping(out, m)


@dataclass(frozen=True)
class ExponentData:
    c: Fraction
    multiplicity: int
    eps: int
    cbar: Fraction
    resonant: bool


def rational_roots(poly: Sequence[Fraction]) -> tuple[list[tuple[Fraction, int]], list]:
    """Rational roots with multiplicities and the leftover irreducible factors.

    ``poly`` lists coefficients from the constant term upwards.
    """
    import sympy

    X = sympy.Symbol("X")
    expr = sympy.Poly(
        list(reversed([sympy.Rational(c.numerator, c.denominator) for c in poly])), X, domain="QQ"
    )
    _, factors = expr.factor_list()
    roots: list[tuple[Fraction, int]] = []
    rest = []
    for f, mult in factors:
        if f.degree() == 1:
            a1, a0 = f.all_coeffs()
            r = -sympy.Rational(a0) / sympy.Rational(a1)
            roots.append((Fraction(int(r.p), int(r.q)), int(mult)))
        elif f.degree() > 1:
            rest.append((f.as_expr(), int(mult)))
    return roots, rest


def exponents(P: OrePoly, mu) -> list[ExponentData]:
    ch = char_equation(P, mu)
    return exponents_of(ch, P.ctx)


def exponents_of(ch: CharEquation, ctx: QContext) -> list[ExponentData]:
    if ch.degree_abs <= 0:
        return []
    roots, rest = rational_roots(ch.polynomial())
    if rest:
        raise IrrationalExponent(
            f"characteristic equation at slope {ch.slope} does not split over Q: {rest[0][0]}",
            factor=rest[0][0],
        )
    roots = [(c, m) for c, m in roots if c != 0]
    data = []
    dec = {c: decompose(c, ctx) for c, _ in roots}
    for c, m in roots:
        eps, cbar = dec[c]
        resonant = any(dec[d][1] == cbar and dec[d][0] > eps for d, _ in roots)
        data.append(ExponentData(c, m, eps, cbar, resonant))
    data.sort(key=lambda e: (e.cbar, e.eps))
    return data


def slopes_integral(P: OrePoly) -> bool:
    return newton_function(P).is_integral()
