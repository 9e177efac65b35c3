"""q-difference modules (K^n, Phi_A) with Phi_A(X) = A^{-1} sigma_q(X)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .errors import (
    DivisionByZeroSeries,
    NonUnitConstantTerm,
    PrecisionInsufficientForRank,
    ShapeMismatch,
    ZeroElement,
)
from .linalg import Matrix, Vector
from .newton import NewtonFunction, newton_function
from .ore import OrePoly, normalize
from .series import LaurentSeries, QContext, decompose, solve_unit_twist


class QDiffModule:
    """A rank-n module given by A, with Phi(X) = A^{-1} sigma_q(X).

    Either matrix may be supplied; the other is computed on demand.  Keeping
    both avoids needless inversions (the dual swaps them, the tensor product
    multiplies them).
    """

    __slots__ = ("_A", "_A_inv", "ctx", "n")

    def __init__(self, A: Matrix | None = None, A_inv: Matrix | None = None):
        if A is None and A_inv is None:
            raise ValueError("a module needs A or its inverse")
        ref = A if A is not None else A_inv
        n, m = linalg.shape(ref)
        if n != m or n == 0:
            raise ShapeMismatch("module matrix must be square and nonempty")
        self._A = A
        self._A_inv = A_inv
        self.ctx: QContext = ref[0][0].ctx
        self.n = n

    @property
    def rank(self) -> int:
        return self.n

    @property
    def A(self) -> Matrix:
        if self._A is None:
            self._A = linalg.inverse(self._A_inv)
        return self._A

    @property
    def A_inv(self) -> Matrix:
        if self._A_inv is None:
            self._A_inv = linalg.inverse(self._A)
        return self._A_inv

    def phi(self, x: Sequence[LaurentSeries]) -> Vector:
        return linalg.mat_vec(self.A_inv, linalg.sigma_vec(x))

    def phi_inv(self, y: Sequence[LaurentSeries]) -> Vector:
        return linalg.sigma_vec(linalg.mat_vec(self.A, y), -1)

    def basis(self, i: int) -> Vector:
        one, zero = LaurentSeries.one(self.ctx), LaurentSeries.zero(self.ctx)
        return tuple(one if j == i else zero for j in range(self.n))

    def element(self, coords: Sequence) -> "ModuleElement":
        return ModuleElement(_vec(self.ctx, coords), self)

    def gauge(self, F: Matrix) -> "QDiffModule":
        """The equivalent module B = (sigma_q F)^{-1} A F."""
        sF = linalg.sigma_mat(F)
        return QDiffModule(linalg.mat_mul(linalg.inverse(sF), linalg.mat_mul(self.A, F)))


@dataclass(frozen=True)
class ModuleElement:
    coords: Vector
    module: QDiffModule

    def valuation(self) -> int:
        return lattice_valuation(self.coords)


def _vec(ctx: QContext, coords: Sequence) -> Vector:
    out = []
    for c in coords:
        if isinstance(c, LaurentSeries):
            out.append(c)
        else:
            out.append(LaurentSeries.monomial(ctx, c, 0) if c != 0 else LaurentSeries.zero(ctx))
    return tuple(out)


def _coords(x) -> Vector:
    return x.coords if isinstance(x, ModuleElement) else tuple(x)


def _companion(P: OrePoly) -> tuple[Matrix, int]:
    N = normalize(P)
    n = N.hi
    if n == 0:
        raise NonUnitConstantTerm("operator of degree 0 has no companion system")
    if N.coeff(0).is_zero():
        raise NonUnitConstantTerm("constant coefficient is zero to precision")
    ctx = P.ctx
    one, zero = LaurentSeries.one(ctx), LaurentSeries.zero(ctx)
    rows = []
    for i in range(n - 1):
        rows.append(tuple(one if j == i + 1 else zero for j in range(n)))
    # a_k is the coefficient of sigma^(n-k); the last row is (-a_n, ..., -a_1)
    rows.append(tuple(-N.coeff(j) for j in range(n)))
    return tuple(rows), n


def from_equation(P: OrePoly) -> QDiffModule:
    """The companion system sigma_q X = A X of P.f = 0."""
    A, _ = _companion(P)
    return QDiffModule(A=A)


def from_operator(P: OrePoly) -> QDiffModule:
    """M_P = D_q/D_q P in the basis 1, sigma, ..., sigma^{n-1}."""
    A, _ = _companion(P)
    return QDiffModule(A_inv=linalg.transpose(A))


def unit_module(ctx: QContext) -> QDiffModule:
    return QDiffModule(A=linalg.identity(ctx, 1), A_inv=linalg.identity(ctx, 1))


def iterates(M: QDiffModule, x: Sequence[LaurentSeries], count: int) -> list[Vector]:
    out = [tuple(x)]
    for _ in range(count - 1):
        out.append(M.phi(out[-1]))
    return out


def _candidates(M: QDiffModule, sweep: int) -> Iterable[Vector]:
    ctx = M.ctx
    for i in range(M.n):
        yield M.basis(i)
    for j in range(sweep):
        yield tuple(LaurentSeries.monomial(ctx, 1, j * i) for i in range(M.n))


def _annihilator(its: list[Vector], ctx: QContext) -> OrePoly:
    """sigma^p + b_1 sigma^{p-1} + ... + b_p from independent its[0..p-1]."""
    p = len(its) - 1
    n = len(its[0])
    basis_cols = its[:p]
    target = its[p]
    rows = None
    for rs in itertools.combinations(range(n), p):
        sub = tuple(tuple(basis_cols[j][r] for j in range(p)) for r in rs)
        if not linalg.det(sub).is_zero():
            rows = rs
            break
    if rows is None:
        raise PrecisionInsufficientForRank("iterates are dependent to precision")
    sub = tuple(tuple(basis_cols[j][r] for j in range(p)) for r in rows)
    coeffs = linalg.solve(sub, [-target[r] for r in rows])
    # target = -sum coeffs[j] Phi^j x, i.e. Phi^p x + sum coeffs[j] Phi^j x = 0
    terms = {p: LaurentSeries.one(ctx)}
    for j, c in enumerate(coeffs):
        terms[j] = c
    return OrePoly(ctx, terms)


def cyclic_vector(M: QDiffModule, sweep: int = 4) -> tuple[ModuleElement, OrePoly]:
    """A cyclic vector x and the minimal polynomial of x."""
    ctx = M.ctx
    for x in _candidates(M, sweep):
        its = iterates(M, x, M.n + 1)
        mat = tuple(tuple(its[j][i] for j in range(M.n)) for i in range(M.n))
        if linalg.det(mat).is_zero():
            continue
        return ModuleElement(x, M), _annihilator(its, ctx)
    raise PrecisionInsufficientForRank("no cyclic vector found among the candidates")


def minimal_polynomial(M: QDiffModule, y) -> OrePoly:
    """Monic annihilator of y of minimal order."""
    y = _vec(M.ctx, _coords(y))
    if all(c.is_zero() for c in y):
        raise ZeroElement("the zero element has no minimal polynomial")
    its = [tuple(y)]
    while True:
        nxt = M.phi(its[-1])
        if linalg.rank(its + [nxt]) <= len(its):
            return _annihilator(its + [nxt], M.ctx)
        its.append(nxt)
        if len(its) > M.n:
            raise PrecisionInsufficientForRank("iterate ranks exceed the module rank")


def dual_module(M: QDiffModule) -> QDiffModule:
    """Contragredient: A^v = tA^{-1}, so (A^v)^{-1} = tA."""
    return QDiffModule(
        A=linalg.transpose(M._A_inv) if M._A_inv is not None else None,
        A_inv=linalg.transpose(M._A) if M._A is not None else None,
    )


def dual_operator(P: OrePoly) -> OrePoly:
    """P^v with b_i = sigma^{n-i-1}(a_{n-i}) / sigma^{n-1}(a_n), a_0 = 1."""
    N = normalize(P)
    n = N.hi
    a = [N.coeff(n - k) for k in range(n + 1)]  # a[k] multiplies sigma^(n-k)
    if a[n].is_zero():
        raise NonUnitConstantTerm("constant coefficient is zero to precision")
    den = a[n].sigma(n - 1).inverse()
    terms = {n: LaurentSeries.one(P.ctx)}
    for i in range(1, n + 1):
        terms[n - i] = a[n - i].sigma(n - i - 1) * den
    return OrePoly(P.ctx, terms)


def dual(obj):
    if isinstance(obj, OrePoly):
        return dual_operator(obj)
    return dual_module(obj)


def tensor(M1: QDiffModule, M2: QDiffModule) -> QDiffModule:
    A = linalg.kron(M1._A, M2._A) if M1._A is not None and M2._A is not None else None
    Ai = linalg.kron(M1._A_inv, M2._A_inv) if M1._A_inv is not None and M2._A_inv is not None else None
    if A is None and Ai is None:
        A = linalg.kron(M1.A, M2.A)
    return QDiffModule(A=A, A_inv=Ai)


def hom_internal(M: QDiffModule, N: QDiffModule) -> QDiffModule:
    return tensor(dual_module(M), N)


def is_morphism(F: Matrix, M: QDiffModule, N: QDiffModule) -> bool:
    """Whether F : M -> N satisfies (sigma_q F) A_M = A_N F."""
    if linalg.shape(F) != (N.n, M.n):
        raise ShapeMismatch(f"expected a {N.n}x{M.n} matrix")
    # equivalent form A_N^{-1} (sigma_q F) = F A_M^{-1}, which avoids inverting
    lhs = linalg.mat_mul(N.A_inv, linalg.sigma_mat(F))
    rhs = linalg.mat_mul(F, M.A_inv)
    return linalg.mat_eq(lhs, rhs)


def newton_module(M: QDiffModule) -> NewtonFunction:
    _, P = cyclic_vector(M)
    return newton_function(P)


def element_slope(M: QDiffModule, y) -> Fraction:
    P = minimal_polynomial(M, y)
    return slope_of_minimal(P)


def slope_of_minimal(P: OrePoly) -> Fraction:
    """min v0(b_i)/i for P = sigma^p + b_1 sigma^{p-1} + ... + b_p."""
    N = normalize(P)
    p = N.hi
    return min(Fraction(N.coeff(p - i).val, i) for i in range(1, p + 1) if not N.coeff(p - i).is_zero())


def lattice_valuation(x) -> int:
    x = _coords(x)
    vals = [c.val for c in x if not c.is_zero()]
    if not vals:
        from .errors import InsufficientPrecision

        raise InsufficientPrecision("element is zero to precision")
    return min(vals)


def iterate_valuations(M: QDiffModule, x, k_range: Iterable[int]) -> list[int]:
    """v_Lambda(Phi^k x) for each k in k_range."""
    x = _vec(M.ctx, _coords(x))
    ks = list(k_range)
    cache: dict[int, Vector] = {0: tuple(x)}
    hi = max([0] + ks)
    lo = min([0] + ks)
    cur = tuple(x)
    for k in range(1, hi + 1):
        cur = M.phi(cur)
        cache[k] = cur
    cur = tuple(x)
    for k in range(-1, lo - 1, -1):
        cur = M.phi_inv(cur)
        cache[k] = cur
    return [lattice_valuation(cache[k]) for k in ks]


def rank_one_equivalent(a: LaurentSeries, b: LaurentSeries) -> bool:
    """Whether sigma - a and sigma - b present isomorphic modules."""
    r = b / a
    if r.val != 0:
        return False
    _, cbar = decompose(r[0], r.ctx)
    return cbar == 1


def rank_one_witness(a: LaurentSeries, b: LaurentSeries) -> Matrix:
    """F with F : M_{sigma-a} -> M_{sigma-b} an isomorphism.

    sigma_q(F)/F must equal a/b.  Writing b/a = q^l beta with beta(0) = 1
    gives F = z^{-l} v where sigma_q(v) = beta^{-1} v.
    """
    if not rank_one_equivalent(a, b):
        raise ValueError("the two rank-one modules are not isomorphic")
    ctx = a.ctx
    r = b / a
    l, _ = decompose(r[0], ctx)
    beta = r.scale(1 / ctx.qpow(l))
    v = solve_unit_twist(beta.inverse())
    return ((v.shift(-l),),)
