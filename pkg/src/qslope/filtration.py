"""Canonical slope filtration, graded module and Hilbert-Samuel polynomial.

For a factorization P = R_1 ... R_k with slopes decreasing left to right,
the submodule M_i of M_P = D/DP is generated by the class of
R_{i+1} ... R_k and is isomorphic to D/D(R_1 ... R_i).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .factor import Factorization, Mode, as_mode, birkhoff_guenther, formal_pure_parts
from .linalg import Vector
from .newton import NewtonFunction, newton_function
from .ore import OrePoly, make_entire, right_divide


def _product(ops, ctx) -> OrePoly:
    out = OrePoly.one(ctx)
    for op in ops:
        out = out * op
    return out


@dataclass
class SlopeFiltration:
    breaks: tuple[Fraction, ...]
    tower: list[OrePoly]           # generator of M_i: R_{i+1} ... R_k
    presentations: list[OrePoly]   # M_i = D / D (R_1 ... R_i)
    quotient_ops: list[OrePoly]    # M_i / M_{i-1} = D / D R_i
    ranks: tuple[int, ...]
    mode: Mode
    factorization: Factorization | None = None


def canonical_filtration(
    P: OrePoly, mode=Mode.CONVERGENT, prec: int | None = None, class_order: Callable | None = None
) -> SlopeFiltration:
    mode = as_mode(mode)
    fac = birkhoff_guenther(P, mode, prec, class_order)
    ops = fac.factors
    k = len(ops)
    r = [newton_function(R) for R in ops]
    breaks = tuple(R.slopes[0] for R in r)
    tower = [_product(ops[i + 1:], P.ctx) for i in range(k)]
    pres = [_product(ops[: i + 1], P.ctx) for i in range(k)]
    ranks = []
    total = 0
    for R in ops:
        total += int(R.deg_abs)
        ranks.append(total)
    return SlopeFiltration(breaks, tower, pres, list(ops), tuple(ranks), mode, fac)


@dataclass
class GradedModule:
    parts: dict[Fraction, OrePoly] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return sum(int(p.deg_abs) for p in self.parts.values())

    def newton(self) -> NewtonFunction:
        out = NewtonFunction()
        for p in self.parts.values():
            out = out + newton_function(p)
        return out


def graded(P: OrePoly, mode=Mode.CONVERGENT, prec: int | None = None) -> GradedModule:
    mode = as_mode(mode)
    if mode is Mode.CONVERGENT:
        filt = canonical_filtration(P, mode, prec)
        return GradedModule(dict(zip(filt.breaks, filt.quotient_ops)))
    r = newton_function(P)
    return GradedModule(dict(zip(r.slopes, formal_pure_parts(P, prec))))


@dataclass(frozen=True)
class TowerSlice:
    """The submodule F^{>=mu}: generated by ``generator``, presented by ``presentation``."""

    rank: int
    generator: OrePoly
    presentation: OrePoly
    slopes: tuple[Fraction, ...]


def f_geq(P: OrePoly, mu, mode=Mode.CONVERGENT, prec: int | None = None) -> TowerSlice:
    mu = Fraction(mu)
    filt = canonical_filtration(P, mode, prec)
    i = sum(1 for b in filt.breaks if b >= mu)
    if i == 0:
        one = OrePoly.one(P.ctx)
        return TowerSlice(0, P, one, ())
    return TowerSlice(filt.ranks[i - 1], filt.tower[i - 1], filt.presentations[i - 1], filt.breaks[:i])


@dataclass(frozen=True)
class HilbertSamuel:
    """Finite sum of r * T^mu with rational exponents."""

    terms: tuple[tuple[Fraction, int], ...] = ()

    @classmethod
    def from_mapping(cls, m: Mapping) -> "HilbertSamuel":
        acc: dict[Fraction, int] = defaultdict(int)
        for e, r in m.items():
            acc[Fraction(e)] += int(r)
        return cls(tuple(sorted((e, r) for e, r in acc.items() if r)))

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.terms)

    def __add__(self, other: "HilbertSamuel") -> "HilbertSamuel":
        acc = self.as_dict()
        for e, r in other.terms:
            acc[e] = acc.get(e, 0) + r
        return HilbertSamuel.from_mapping(acc)

    def __mul__(self, other: "HilbertSamuel") -> "HilbertSamuel":
        acc: dict[Fraction, int] = defaultdict(int)
        for e1, r1 in self.terms:
            for e2, r2 in other.terms:
                acc[e1 + e2] += r1 * r2
        return HilbertSamuel.from_mapping(acc)

    def invert_variable(self) -> "HilbertSamuel":
        """T -> T^{-1}."""
        return HilbertSamuel.from_mapping({-e: r for e, r in self.terms})

    def __str__(self) -> str:
        parts = []
        for e, r in self.terms:
            mono = "1" if e == 0 else f"T^{e}"
            parts.append(mono if r == 1 else f"{r}*{mono}")
        return " + ".join(parts) or "0"


def hilbert_samuel(r: NewtonFunction) -> HilbertSamuel:
    return HilbertSamuel.from_mapping(r.as_dict())


# Coordinates in M_P = D/DP, used to compare submodules across morphisms.

def class_coordinates(X: OrePoly, P: OrePoly) -> Vector:
    """Coordinates of the class of X in the basis 1, sigma, ..., sigma^{n-1}."""
    Pe, _ = make_entire(P)
    n = Pe.hi
    _, R = right_divide(X, Pe)
    if not R.is_zero() and any(not c.is_zero() and not 0 <= k < n for k, c in R.terms.items()):
        raise ValueError("remainder left the standard window")
    return tuple(R.coeff(j) for j in range(n))


def submodule_basis(P: OrePoly, G: OrePoly) -> list[Vector]:
    """K-basis of the submodule generated by the class of G in D/DP.

    With P = L G the submodule is D/DL, of rank deg L, spanned by sigma^j G.
    """
    L, R = right_divide(P, G)
    if not R.is_zero():
        raise ValueError("generator does not right-divide the operator")
    rk = int(L.deg_abs)
    return [class_coordinates(OrePoly.sigma(P.ctx, j) * G, P) for j in range(rk)]


def project_classes(P: OrePoly, R: OrePoly, G: OrePoly) -> list[Vector]:
    """Image under D/DP -> D/DR of the submodule generated by G."""
    L, _ = right_divide(P, G)
    rk = int(L.deg_abs)
    return [class_coordinates(OrePoly.sigma(P.ctx, j) * G, R) for j in range(rk)]
