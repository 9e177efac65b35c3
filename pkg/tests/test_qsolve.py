from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslope.errors import ComponentCollision, DivergentDirection
from qslope.exprs import parse
from qslope.factor import GEOMETRIC, Mode, first_order_factorization, growth_class
from qslope.newton import newton_function
from qslope.ore import OrePoly
from qslope.qsolve import (
    SymbolElement,
    adams_solutions,
    apply_symbol,
    formal_basis,
    phi_solve,
    q_integrate_lq,
    q_wronskian,
    solve_first_order,
)
from qslope.series import LaurentSeries, QContext, series
from strategies import CTX16, product, random_first_order

ctx = QContext()
F = Fraction
DIVERGENT = "q*z*s^2-(1+z)*s+1"
SPLIT = "z*s^2-(1+z)*s+1"


def phi_op(d, nu, context=ctx) -> OrePoly:
    """d z^nu sigma - 1."""
    return OrePoly(context, {1: LaurentSeries.monomial(context, d, nu), 0: -1})


# apply ---------------------------------------------------------------------------

def test_apply_examples():
    assert apply_symbol(parse("s-1", ctx), SymbolElement.lq(ctx)) == SymbolElement.from_series(LaurentSeries.one(ctx))
    e = SymbolElement.character(ctx, F(3, 2))
    assert apply_symbol(parse("s-3/2", ctx), e).is_zero()
    assert apply_symbol(parse("z*s-1", ctx), SymbolElement.character(ctx, 1, -1)).is_zero()


def test_character_canonicalization():
    # e_{3} = e_{2 * 3/2} is stored as z e_{3/2}
    e = SymbolElement.character(ctx, 3)
    assert e.keys() == [(F(3, 2), 0)]
    assert e[(F(3, 2), 0)][0] == series(ctx, [0, 1])
    assert apply_symbol(parse("s-3", ctx), e).is_zero()


def test_component_collision():
    with pytest.raises(ComponentCollision):
        SymbolElement(ctx, {(F(3), 0): (1,), (F(3, 2), 0): (1,)})
    merged = SymbolElement(ctx, {(F(3), 0): (1,), (F(3, 2), 0): (1,)}, merge=True)
    assert merged[(F(3, 2), 0)][0] == series(ctx, [1, 1])


# q-integration --------------------------------------------------------------------

def test_q_integrate_examples():
    one, zero = LaurentSeries.one(ctx), LaurentSeries.zero(ctx)
    assert q_integrate_lq([one]) == (zero, one)
    assert q_integrate_lq([zero, one]) == (zero, zero, one)
    assert q_integrate_lq([series(ctx, [0, 1])]) == (series(ctx, [0, 1]),)  # z / (q - 1) with q = 2


lq_inputs = st.lists(
    st.dictionaries(st.integers(-2, 4), st.sampled_from([F(1), F(-2), F(1, 3), F(5)]), max_size=3),
    min_size=1, max_size=4,
)


@settings(max_examples=60, deadline=None)
@given(lq_inputs)
def test_q_integrate_roundtrip(polys):
    g = [LaurentSeries.from_dict(CTX16, p, 16) for p in polys]
    f = q_integrate_lq(g)
    lhs = apply_symbol(parse("s-1", CTX16), SymbolElement._canonical(CTX16, {(F(1), 0): f}))
    assert lhs == SymbolElement._canonical(CTX16, {(F(1), 0): tuple(g)})


# first-order solves ----------------------------------------------------------------

def test_phi_solve_diagonal_case():
    c = F(3, 2)
    g = series(ctx, [1, 2, -1, 5])
    f = phi_solve(c, 0, g)
    comp = f[(F(1), 0)][0]
    for k in range(4):
        assert comp[k] == g[k] / (c * 2 ** k - 1)


def test_phi_solve_q_euler():
    f = phi_solve(1, 1, SymbolElement.from_series(LaurentSeries.monomial(ctx, -1)), prec=33)
    comp = f[(F(1), 0)][0]
    assert [comp[k] for k in range(33)] == [F(2) ** (k * (k - 1) // 2) for k in range(33)]


def test_phi_solve_raises_log_degree():
    f = phi_solve(1, 0, SymbolElement.from_series(LaurentSeries.one(ctx)))
    assert f == SymbolElement.lq(ctx)
    # d = 2 lands in q^Z: the solution is z^-1 l_q
    f2 = phi_solve(2, 0, SymbolElement.from_series(LaurentSeries.monomial(ctx, 1, -1)))
    assert f2.lq_degree() == 1


def test_divergent_direction_boundary():
    g = SymbolElement.character(ctx, 1, -1)
    for nu in range(-3, 4):
        if -1 + nu > 0:
            with pytest.raises(DivergentDirection):
                phi_solve(1, nu, g, Mode.CONVERGENT)
        else:
            f = phi_solve(1, nu, g, Mode.CONVERGENT)
            assert apply_symbol(phi_op(1, nu), f) == g


def test_split_cross_solve_converges():
    f2 = phi_solve(1, 0, SymbolElement.character(ctx, 1, -1), Mode.CONVERGENT, prec=32)
    assert apply_symbol(parse("s-1", ctx), f2) == SymbolElement.character(ctx, 1, -1)
    assert [growth_class(f).kind for _, _, f in f2.series_components()] == [GEOMETRIC]


keys = st.tuples(st.sampled_from([F(1), F(3, 2), F(5, 4)]), st.integers(-2, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([F(1), F(2), F(1, 2), F(3), F(-1), F(4)]), st.integers(-2, 2), keys,
       st.lists(st.dictionaries(st.integers(-1, 3), st.sampled_from([F(1), F(-3), F(2, 5)]), max_size=3),
                min_size=1, max_size=3))
def test_phi_solve_roundtrip(d, nu, key, polys):
    g = SymbolElement(CTX16, {key: tuple(LaurentSeries.from_dict(CTX16, p, 16) for p in polys)})
    f = phi_solve(d, nu, g, prec=16)
    assert apply_symbol(phi_op(d, nu, CTX16), f) == g


# solution bases ---------------------------------------------------------------------

def test_formal_basis_examples():
    assert formal_basis(parse("s-1", ctx)).elements == [SymbolElement.from_series(LaurentSeries.one(ctx))]
    b = formal_basis(parse("(s-1)^2", ctx))
    assert b.elements == [SymbolElement.from_series(LaurentSeries.one(ctx)), SymbolElement.lq(ctx)]


def test_formal_basis_divergent_example():
    P = parse(DIVERGENT, ctx)
    b = formal_basis(P, prec=32)
    assert len(b) == 2
    assert b[0] == SymbolElement.character(ctx, 1, -1)
    comp = b[1][(F(1), 0)][0]
    n = int(comp.prec)
    assert n >= 30
    assert [comp[k] for k in range(n)] == [-F(2) ** (k * (k - 1) // 2) for k in range(n)]
    kinds = [g.kind for rec in b.growth() for g in rec.values() if g is not None]
    assert "q-exponential" in kinds


def test_adams_examples():
    P = parse(DIVERGENT, ctx)
    a = adams_solutions(P)
    assert len(a) == newton_function(P)(newton_function(P).first_slope) == 1
    assert a[0] == SymbolElement.character(ctx, 1, -1)
    full = adams_solutions(parse("(s-3)*((1-z)*s-1)", ctx))
    assert len(full) == 2
    assert all(g.kind == GEOMETRIC for rec in full.growth() for g in rec.values() if g is not None)


def test_wronskian_examples():
    e = SymbolElement.character(ctx, F(3, 2))
    one = SymbolElement.from_series(LaurentSeries.one(ctx))
    assert q_wronskian([e]) == e
    assert q_wronskian([one, e]) == e.scale(F(1, 2))
    assert q_wronskian([e, e]).is_zero()


def test_wronskian_recursion_identity():
    # W(f, f_1..f_m) = (-1)^m (h / b_top) W(f_1..f_m) when Q f = h and f_i span ker Q
    for text, m in [("(s-3)*(s-1)", 2), ("2*s-1", 1)]:
        Q = parse(text, ctx)
        base = formal_basis(Q)
        h = SymbolElement.character(ctx, F(5, 4))
        a, pieces = first_order_factorization(Q)
        part = h.scale(a.coeff(0).inverse())
        for piece in pieces:
            part = solve_first_order(piece, part)
        assert apply_symbol(Q, part) == h
        lhs = q_wronskian([part] + base.elements)
        rhs = (q_wronskian(base.elements) * h).scale(F((-1) ** m) / Q.coeff(Q.hi)[0])
        assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_random_formal_bases(seed):
    rng = random.Random(seed)
    ops = [random_first_order(rng, rng.randint(-1, 1), CTX16) for _ in range(rng.randint(1, 3))]
    P = product(ops, CTX16)
    b = formal_basis(P, prec=16)
    assert len(b) == P.deg_abs
    assert all(apply_symbol(P, s).is_zero() for s in b)
    assert not q_wronskian(b.elements).is_zero()
