"""Formal solutions in the symbol algebra generated by e_c, Theta and l_q.

An element is a finite sum over keys (cbar, theta) of

    (f_0 + f_1 l^(1) + ... + f_d l^(d)) * e_cbar * Theta^theta

with f_k Laurent series and l^(k) = binomial(l_q, k).  The binomial basis
keeps sigma_q unipotent and integer: sigma_q l^(k) = l^(k) + l^(k-1).
A character e_c with c = q^eps * cbar is stored as z^eps e_cbar.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import (
    BasisVerificationFailed,
    ComponentCollision,
    DivergentDirection,
    InsufficientData,
    InsufficientPrecision,
    NonIntegralSlope,
)
from .factor import (
    FirstOrderFactor,
    GrowthClass,
    Mode,
    as_mode,
    factor_slope,
    first_order_factorization,
    growth_class,
)
from .newton import newton_function
from .ore import OrePoly
from .series import INF, LaurentSeries, QContext, decompose, q_integrate_series, scalar

Key = tuple[Fraction, int]
LqPoly = tuple[LaurentSeries, ...]


def _zero(ctx: QContext, prec=INF) -> LaurentSeries:
    return LaurentSeries.zero(ctx, prec)


def _trim(poly: Sequence[LaurentSeries]) -> LqPoly:
    out = list(poly)
    while len(out) > 1 and out[-1].is_zero() and out[-1].is_exact:
        out.pop()
    return tuple(out)


def _poly_add(a: LqPoly, b: LqPoly, ctx: QContext) -> LqPoly:
    n = max(len(a), len(b))
    z = _zero(ctx)
    return _trim([(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)])


def _poly_mul(a: LqPoly, b: LqPoly, ctx: QContext) -> LqPoly:
    # C(x,i) C(x,j) = sum_k C(k,i) C(i,k-j) C(x,k), max(i,j) <= k <= i+j
    out = [_zero(ctx) for _ in range(len(a) + len(b) - 1)]
    for i, fa in enumerate(a):
        if fa.is_zero() and fa.is_exact:
            continue
        for j, fb in enumerate(b):
            if fb.is_zero() and fb.is_exact:
                continue
            prod = fa * fb
            for k in range(max(i, j), i + j + 1):
                m = comb(k, i) * comb(i, k - j)
                if m:
                    out[k] = out[k] + prod.scale(m)
    return _trim(out)


def _as_series(ctx: QContext, a) -> LaurentSeries:
    if isinstance(a, LaurentSeries):
        return a
    a = scalar(a)
    return LaurentSeries.monomial(ctx, a, 0) if a else _zero(ctx)


class SymbolElement:
    """Immutable element of the symbol algebra over a q-context."""

    __slots__ = ("ctx", "components")

    def __init__(self, ctx: QContext, components: Mapping | None = None, merge: bool = False):
        self.ctx = ctx
        comps: dict[Key, LqPoly] = {}
        sources: dict[Key, object] = {}
        for (c, theta), poly in (components or {}).items():
            eps, cbar = decompose(c, ctx)
            key = (cbar, int(theta))
            if isinstance(poly, (LaurentSeries, int, Fraction)):
                poly = (poly,)
            poly = tuple(_as_series(ctx, f).shift(eps) for f in poly)
            if key in comps:
                if not merge and sources[key] != scalar(c):
                    raise ComponentCollision(
                        f"keys {sources[key]} and {c} both canonicalize to cbar={cbar}, theta={theta}"
                    )
                comps[key] = _poly_add(comps[key], poly, ctx)
            else:
                comps[key] = _trim(poly)
                sources[key] = scalar(c)
        self.components = comps

    @classmethod
    def _canonical(cls, ctx: QContext, comps: dict[Key, LqPoly]) -> "SymbolElement":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.components = {k: v for k, v in comps.items() if v}
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, ctx: QContext) -> "SymbolElement":
        return cls._canonical(ctx, {})

    @classmethod
    def from_series(cls, f: LaurentSeries) -> "SymbolElement":
        return cls._canonical(f.ctx, {(Fraction(1), 0): (f,)})

    @classmethod
    def character(cls, ctx: QContext, c, theta: int = 0, coeff=1) -> "SymbolElement":
        """coeff * e_c * Theta^theta."""
        return cls(ctx, {(scalar(c), theta): (coeff,)})

    @classmethod
    def lq(cls, ctx: QContext, k: int = 1) -> "SymbolElement":
        """The binomial l^(k) = C(l_q, k)."""
        poly = tuple(LaurentSeries.one(ctx) if i == k else _zero(ctx) for i in range(k + 1))
        return cls._canonical(ctx, {(Fraction(1), 0): poly})

    # queries --------------------------------------------------------------
    def keys(self) -> list[Key]:
        return sorted(self.components)

    def __getitem__(self, key: Key) -> LqPoly:
        return self.components.get(key, (_zero(self.ctx),))

    def lq_degree(self) -> int:
        return max((len(p) - 1 for p in self.components.values()), default=0)

    def is_zero(self) -> bool:
        return all(f.is_zero() for p in self.components.values() for f in p)

    @property
    def prec(self):
        return min((f.prec for p in self.components.values() for f in p), default=INF)

    def series_components(self) -> Iterable[tuple[Key, int, LaurentSeries]]:
        for key in self.keys():
            for k, f in enumerate(self.components[key]):
                yield key, k, f

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "SymbolElement":
        if isinstance(other, SymbolElement):
            return other
        if isinstance(other, (LaurentSeries, int, Fraction)):
            return SymbolElement.from_series(_as_series(self.ctx, other))
        return NotImplemented

    def __add__(self, other) -> "SymbolElement":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        comps = dict(self.components)
        for k, p in other.components.items():
            comps[k] = _poly_add(comps[k], p, self.ctx) if k in comps else p
        return SymbolElement._canonical(self.ctx, comps)

    __radd__ = __add__

    def __neg__(self) -> "SymbolElement":
        return self.scale(Fraction(-1))

    def __sub__(self, other) -> "SymbolElement":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SymbolElement":
        return (-self) + other

    def scale(self, a) -> "SymbolElement":
        """Multiply by a scalar or a Laurent series."""
        if isinstance(a, LaurentSeries):
            comps = {k: tuple(a * f for f in p) for k, p in self.components.items()}
        else:
            comps = {k: tuple(f.scale(a) for f in p) for k, p in self.components.items()}
        return SymbolElement._canonical(self.ctx, comps)

    def __mul__(self, other) -> "SymbolElement":
        if isinstance(other, (LaurentSeries, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SymbolElement):
            return NotImplemented
        ctx = self.ctx
        comps: dict[Key, LqPoly] = {}
        for (c1, t1), p1 in self.components.items():
            for (c2, t2), p2 in other.components.items():
                eps, cbar = decompose(c1 * c2, ctx)
                prod = _poly_mul(p1, p2, ctx)
                if eps:
                    prod = tuple(f.shift(eps) for f in prod)
                key = (cbar, t1 + t2)
                comps[key] = _poly_add(comps[key], prod, ctx) if key in comps else prod
        return SymbolElement._canonical(ctx, comps)

    __rmul__ = __mul__

    def _sigma_once(self) -> "SymbolElement":
        comps = {}
        for (cbar, theta), p in self.components.items():
            sp = [f.sigma(1) for f in p]
            new = [(sp[k] + sp[k + 1]) if k + 1 < len(sp) else sp[k] for k in range(len(sp))]
            comps[(cbar, theta)] = tuple(f.shift(theta).scale(cbar) for f in new)
        return SymbolElement._canonical(self.ctx, comps)

    def _sigma_inv_once(self) -> "SymbolElement":
        # sigma^{-1} l^(k) = sum_j (-1)^j l^(k-j); sigma^{-1}(e Theta^t) = cbar^{-1} q^t z^{-t} e Theta^t
        comps = {}
        for (cbar, theta), p in self.components.items():
            sp = [f.sigma(-1) for f in p]
            new = []
            for i in range(len(sp)):
                acc = _zero(self.ctx)
                for k in range(i, len(sp)):
                    acc = acc + sp[k] if (k - i) % 2 == 0 else acc - sp[k]
                new.append(acc)
            factor = self.ctx.qpow(theta) / cbar
            comps[(cbar, theta)] = tuple(f.shift(-theta).scale(factor) for f in new)
        return SymbolElement._canonical(self.ctx, comps)

    def sigma(self, k: int = 1) -> "SymbolElement":
        out = self
        step = SymbolElement._sigma_once if k > 0 else SymbolElement._sigma_inv_once
        for _ in range(abs(k)):
            out = step(out)
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if not self.components:
            return "SymbolElement(0)"
        parts = []
        for (cbar, theta), p in sorted(self.components.items()):
            body = " + ".join(
                f"({f!r})" + ("" if k == 0 else f"*l^({k})") for k, f in enumerate(p) if not f.is_zero()
            ) or "0"
            tag = []
            if cbar != 1:
                tag.append(f"e_{cbar}")
            if theta:
                tag.append(f"Theta^{theta}")
            parts.append(f"[{body}]" + ("*" + "*".join(tag) if tag else ""))
        return "SymbolElement(" + " + ".join(parts) + ")"


def as_symbol(ctx: QContext, g) -> SymbolElement:
    if isinstance(g, SymbolElement):
        return g
    return SymbolElement.from_series(_as_series(ctx, g))


def apply_symbol(P: OrePoly, s) -> SymbolElement:
    """P(sigma_q) applied to s, i.e. sum_k a_k sigma_q^k(s)."""
    s = as_symbol(P.ctx, s)
    out = SymbolElement.zero(P.ctx)
    if P.is_zero():
        return out
    cur = s.sigma(P.lo)
    for k in range(P.lo, P.hi + 1):
        a = P.coeff(k)
        if not a.is_zero():
            out = out + cur.scale(a)
        if k < P.hi:
            cur = cur.sigma(1)
    return out


# q-integration on K[l_q] -------------------------------------------------------

def q_integrate_lq(g: Sequence[LaurentSeries], k: int | None = None) -> LqPoly:
    """f of l_q-degree k with (sigma_q - 1) f = g; the free constant is 0.

    Back-substitution from the top: f_k = pi_0(g_{k-1}) and
    f_i = pi_0(g_{i-1}) + I_q(g_i - sigma_q f_{i+1}).
    """
    g = list(g)
    if not g:
        raise ValueError("empty integrand")
    ctx = g[0].ctx
    if k is None:
        k = len(g)
    if len(g) > k:
        raise ValueError(f"integrand has l_q-degree {len(g) - 1} > {k - 1}")
    g += [_zero(ctx)] * (k - len(g))
    f: list[LaurentSeries] = [_zero(ctx)] * (k + 1)

    def pi0(a: LaurentSeries) -> LaurentSeries:
        return LaurentSeries.monomial(ctx, a[0], 0) if a[0] else _zero(ctx)

    f[k] = pi0(g[k - 1]) if k >= 1 else _zero(ctx)
    for i in range(k - 1, -1, -1):
        rest = g[i] - f[i + 1].sigma(1)
        # the constant term of rest vanishes by the choice of f[i+1]
        rest = rest - pi0(rest) if rest.prec > 0 and rest[0] else rest
        f[i] = q_integrate_series(rest) + (pi0(g[i - 1]) if i >= 1 else _zero(ctx))
    return _trim(f)


# first-order solves --------------------------------------------------------------

def _twisted_solve(C: Fraction, m: int, r: LaurentSeries, prec: int | None) -> LaurentSeries:
    """h with C z^m sigma_q(h) - h = r, C not in q^Z when m = 0."""
    ctx = r.ctx
    qp = ctx.qpow
    n_terms = prec if prec is not None else ctx.default_prec
    if m == 0:
        return r.map_coeffs(lambda k, c: c / (C * qp(k) - 1) if c else c)
    if r.is_zero() and r.is_exact:
        return r
    if m > 0:
        # h_n = C q^(n-m) h_(n-m) - r_n, from the valuation of r upwards
        if r.is_zero():
            return _zero(ctx, r.prec)
        v = r.val
        top = v + n_terms if r.is_exact else int(r.prec)
        h: dict[int, Fraction] = {}
        for n in range(v, top):
            h[n] = C * qp(n - m) * h.get(n - m, 0) - r.get(n)
        return LaurentSeries.from_dict(ctx, h, top)
    M = -m
    # C q^j h_j = r_(j-M) + h_(j-M): valuation rises by M
    if r.is_zero():
        return _zero(ctx, r.prec + M)
    v = r.val + M
    top = v + n_terms if r.is_exact else int(r.prec) + M
    h = {}
    for j in range(v, top):
        h[j] = (r.get(j - M) + h.get(j - M, 0)) / (C * qp(j))
    return LaurentSeries.from_dict(ctx, h, top)


def _solve_component(C: Fraction, m: int, g: LqPoly, prec: int | None) -> LqPoly:
    ctx = g[0].ctx
    if m == 0:
        l = ctx.in_qZ(C)
        if l is not None:
            # F = z^(-l) H with (sigma_q - 1) H = z^l G
            H = q_integrate_lq([f.shift(l) for f in g])
            return tuple(f.shift(-l) for f in H)
    d = len(g) - 1
    f: list[LaurentSeries] = [_zero(ctx)] * (d + 1)
    for k in range(d, -1, -1):
        rhs = g[k]
        if k < d:
            rhs = rhs - f[k + 1].sigma(1).shift(m).scale(C)
        f[k] = _twisted_solve(C, m, rhs, prec)
    return _trim(f)


def phi_solve(d, nu: int, g, mode=Mode.FORMAL, prec: int | None = None, ctx: QContext | None = None) -> SymbolElement:
    """f with (d z^nu sigma_q - 1) f = g, solved component by component."""
    mode = as_mode(mode)
    d = scalar(d)
    if ctx is None:
        ctx = g.ctx
    g = as_symbol(ctx, g)
    if mode is Mode.CONVERGENT:
        bad = [key for key in g.components if key[1] + nu > 0]
        if bad:
            raise DivergentDirection(
                f"theta + nu = {bad[0][1] + nu} > 0: no convergent solution in that component"
            )
    comps = {}
    for (cbar, theta), poly in g.components.items():
        comps[(cbar, theta)] = _solve_component(cbar * d, theta + nu, poly, prec)
    return SymbolElement._canonical(ctx, comps)


# solution bases ------------------------------------------------------------------

@dataclass
class SolutionBasis:
    elements: list[SymbolElement]
    provenance: list[FirstOrderFactor] = field(default_factory=list)
    mode: Mode = Mode.FORMAL

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> SymbolElement:
        return self.elements[i]

    def growth(self) -> list[dict[tuple[Key, int], GrowthClass | None]]:
        """growth_class of every nonzero series coefficient, None when too short to classify."""
        out = []
        for s in self.elements:
            rec = {}
            for key, k, f in s.series_components():
                if f.is_zero():
                    continue
                try:
                    rec[(key, k)] = growth_class(f)
                except InsufficientData:
                    rec[(key, k)] = None
            out.append(rec)
        return out


def factor_solution(F: FirstOrderFactor) -> SymbolElement:
    """u e_c Theta^mu, the solution of (z^-mu sigma - c) u^-1."""
    return SymbolElement(F.u.ctx, {(F.c, F.slope): (F.u,)})


def solve_first_order(F: FirstOrderFactor, h: SymbolElement, mode=Mode.FORMAL, prec: int | None = None) -> SymbolElement:
    """h' with F h' = h for F = (z^-mu sigma - c) u^-1."""
    cinv = 1 / F.c
    w = phi_solve(cinv, -F.slope, h.scale(cinv), mode, prec, F.u.ctx)
    return w.scale(F.u)


def solutions_from_factors(
    pieces: Sequence[FirstOrderFactor], mode=Mode.FORMAL, prec: int | None = None
) -> SolutionBasis:
    """Solutions of F_n ... F_1 given pieces = [F_n, ..., F_1].

    The j-th solution f_j solves (F_(j-1) ... F_1) f_j = u_j e_(c_j) Theta^(mu_j);
    the basis is ordered f_1, ..., f_n.
    """
    mode = as_mode(mode)
    order = list(reversed(pieces))
    sols = []
    for j, F in enumerate(order):
        h = factor_solution(F)
        for i in range(j - 1, -1, -1):
            h = solve_first_order(order[i], h, mode, prec)
        sols.append(h)
    return SolutionBasis(sols, list(order), mode)


def _verify(P: OrePoly, basis: SolutionBasis) -> None:
    for i, s in enumerate(basis.elements):
        if not apply_symbol(P, s).is_zero():
            raise BasisVerificationFailed(f"solution {i} is not annihilated to precision")
    if basis.elements and q_wronskian(basis.elements).is_zero():
        raise BasisVerificationFailed("q-Wronskian vanishes to precision")


def formal_basis(P: OrePoly, prec: int | None = None, verify: bool = True, class_order=None) -> SolutionBasis:
    """deg_abs(P) independent solutions in the symbol algebra."""
    _, pieces = first_order_factorization(P, Mode.FORMAL, prec, class_order)
    basis = solutions_from_factors(pieces, Mode.FORMAL, prec)
    if verify:
        _verify(P, basis)
    return basis


def adams_solutions(P: OrePoly, prec: int | None = None, verify: bool = True) -> SolutionBasis:
    """Convergent solutions attached to the first slope."""
    r = newton_function(P)
    mu = r.first_slope
    if mu.denominator != 1:
        raise NonIntegralSlope(f"first slope {mu} is not integral; ramify first")
    fac = factor_slope(P, int(mu), Mode.CONVERGENT, prec)
    basis = solutions_from_factors(fac.all_pieces(), Mode.CONVERGENT, prec)
    if verify:
        _verify(P, basis)
    return basis


# q-Wronskian ---------------------------------------------------------------------

def _det(rows: list[list[SymbolElement]], ctx: QContext) -> SymbolElement:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out = SymbolElement.zero(ctx)
    for i in range(n):
        a = rows[i][0]
        if a.is_zero() and a.prec == INF:
            continue
        minor = [row[1:] for r, row in enumerate(rows) if r != i]
        term = a * _det(minor, ctx)
        out = out + term if i % 2 == 0 else out - term
    return out


def q_wronskian(fs: Sequence) -> SymbolElement:
    """det(sigma_q^i f_j) for 0 <= i, j < n."""
    if not fs:
        raise ValueError("the q-Wronskian needs at least one element")
    ctx = next((f.ctx for f in fs if isinstance(f, (SymbolElement, LaurentSeries))), None)
    if ctx is None:
        raise ValueError("cannot infer a q-context from plain scalars")
    fs = [as_symbol(ctx, f) for f in fs]
    n = len(fs)
    rows = [fs]
    for _ in range(n - 1):
        rows.append([f.sigma(1) for f in rows[-1]])
    return _det([list(r) for r in rows], ctx)
