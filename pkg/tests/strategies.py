"""Random operators and hypothesis strategies shared by the test suite."""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from qslope.ore import OrePoly
from qslope.series import LaurentSeries, QContext

CTX = QContext(default_prec=32)
CTX16 = QContext(default_prec=16)

COEFF_POOL = [Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(3), Fraction(-1, 3)]
EXP_RANGE = range(-2, 4)


def random_coeff(rng: random.Random, ctx: QContext = CTX) -> LaurentSeries:
    """One or two Laurent monomials drawn from the fixed pool."""
    terms = {}
    for _ in range(rng.randint(1, 2)):
        terms[rng.choice(EXP_RANGE)] = rng.choice(COEFF_POOL)
    return LaurentSeries.from_dict(ctx, terms)


def random_entire(rng: random.Random, max_deg: int = 3, ctx: QContext = CTX, unitary: bool = False) -> OrePoly:
    n = rng.randint(1, max_deg)
    terms = {}
    for k in range(n + 1):
        if k in (0, n) or rng.random() < 0.6:
            terms[k] = random_coeff(rng, ctx)
    if unitary:
        terms[n] = LaurentSeries.one(ctx)
    return OrePoly(ctx, terms)


EXPONENT_POOL = [Fraction(1), Fraction(3, 2), Fraction(-1), Fraction(5, 3), Fraction(2), Fraction(1, 2), Fraction(-3)]


def first_order(ctx: QContext, slope: int, c: Fraction, b: Fraction = Fraction(0)) -> OrePoly:
    """z^(-slope) (1 + b z) sigma - c: slope `slope`, exponent c at that slope."""
    top = LaurentSeries.from_dict(ctx, {-slope: 1, 1 - slope: b})
    return OrePoly(ctx, {1: top, 0: LaurentSeries.monomial(ctx, -c)})


def random_first_order(rng: random.Random, slope: int, ctx: QContext = CTX, c=None) -> OrePoly:
    c = rng.choice(EXPONENT_POOL) if c is None else c
    b = rng.choice([Fraction(0), Fraction(1), Fraction(-1, 2), Fraction(2)])
    return first_order(ctx, slope, c, b)


def product(ops, ctx: QContext = CTX) -> OrePoly:
    out = OrePoly.one(ctx)
    for op in ops:
        out = out * op
    return out


def distinct_slope_product(rng: random.Random, ctx: QContext = CTX, k: int | None = None):
    """Product of first-order factors with pairwise distinct integer slopes, in random order."""
    k = k or rng.randint(2, 3)
    slopes = rng.sample(range(-2, 3), k)
    ops = [random_first_order(rng, mu, ctx) for mu in slopes]
    return product(ops, ctx), sorted(slopes, reverse=True)


# hypothesis strategies --------------------------------------------------------

scalars = st.sampled_from(COEFF_POOL)
small_exps = st.integers(min_value=-2, max_value=3)


@st.composite
def laurent_polys(draw, ctx: QContext = CTX16, max_terms: int = 3):
    terms = draw(st.dictionaries(small_exps, scalars, min_size=1, max_size=max_terms))
    return LaurentSeries.from_dict(ctx, terms)


@st.composite
def entire_ops(draw, ctx: QContext = CTX16, max_deg: int = 3):
    n = draw(st.integers(min_value=1, max_value=max_deg))
    terms = {k: draw(laurent_polys(ctx)) for k in range(n + 1)}
    return OrePoly(ctx, terms)


@st.composite
def rank_one_ops(draw, ctx: QContext = CTX16):
    slope = draw(st.integers(min_value=-2, max_value=2))
    c = draw(st.sampled_from(EXPONENT_POOL))
    b = draw(st.sampled_from([Fraction(0), Fraction(1), Fraction(-1, 2)]))
    return first_order(ctx, slope, c, b)
