"""End-to-end acceptance checks, one per headline criterion.

Each test prints a single ``PASS <name>`` or ``FAIL <name>`` line (visible
with ``pytest -s`` or in the terminal summary) and then asserts.  Random
inputs come from fixed seeds so every run checks the same corpus.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from qslope.errors import DivergentDirection
from qslope.exprs import format_operator, parse
from qslope.factor import GEOMETRIC, Q_EXPONENTIAL, Mode, birkhoff_guenther, growth_class
from qslope.filtration import canonical_filtration, graded, hilbert_samuel
from qslope.newton import char_equation, char_of_product, newton_function, nf_convolve, nf_reflect
from qslope.ore import OrePoly
from qslope.qmodule import (
    cyclic_vector,
    dual_module,
    dual_operator,
    from_operator,
    iterate_valuations,
    newton_module,
    tensor,
)
from qslope.qsolve import (
    SymbolElement,
    adams_solutions,
    apply_symbol,
    formal_basis,
    phi_solve,
    q_integrate_lq,
    q_wronskian,
)
from qslope.series import LaurentSeries, QContext
from strategies import CTX, CTX16, distinct_slope_product, product, random_coeff, random_entire, random_first_order

F = Fraction
ctx = QContext()
SPLIT = "z*s^2-(1+z)*s+1"
DIVERGENT = "q*z*s^2-(1+z)*s+1"
TIME_BUDGET = 5.0


@pytest.fixture
def report(capsys):
    """Print one verdict line per criterion, bypassing output capture."""

    def emit(name: str, ok: bool, detail: str = "", elapsed: float | None = None) -> None:
        extra = f" ({detail})" if detail else ""
        timing = f" [{elapsed:.2f}s]" if elapsed is not None else ""
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}{extra}{timing}")
        assert ok, f"{name}{extra}"

    return emit


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# 1 ----------------------------------------------------------------------------

def test_worked_example_slopes(report):
    def run():
        want = {F(0): 1, F(-1): 1}
        return all(newton_function(parse(s, ctx)).as_dict() == want for s in (SPLIT, DIVERGENT))

    ok, dt = timed(run)
    report("worked-example slopes", ok and dt < TIME_BUDGET, "both operators give {0:1, -1:1}", dt)


# 2 ----------------------------------------------------------------------------

def test_canonical_factorization(report):
    def run():
        P = parse(DIVERGENT, ctx)
        fac = birkhoff_guenther(P)
        return (
            fac.factors == [parse("s-1", ctx), parse("z*s-1", ctx)]
            and [format_operator(f) for f in fac.factors] == ["s-1", "z*s-1"]
            and all(u == LaurentSeries.one(ctx) for tw in fac.twists for u in tw)
            and fac.product() == P
        )

    ok, dt = timed(run)
    report("canonical factorization", ok and dt < TIME_BUDGET, "[s-1, z*s-1], twists 1, exact product", dt)


# 3 ----------------------------------------------------------------------------

def test_q_euler_series(report):
    def run():
        # (z sigma - 1) f = 1, i.e. d = 1, nu = 1, g = 1; 33 terms cover 0 <= k <= 32
        f = phi_solve(1, 1, SymbolElement.from_series(LaurentSeries.one(ctx)), Mode.FORMAL, prec=33)
        comp = f[(F(1), 0)][0]
        exact = [comp[k] for k in range(33)] == [-F(2) ** (k * (k - 1) // 2) for k in range(33)]
        kind = growth_class(comp).kind
        # cross-solve of the split example: (sigma - 1) f = e_{z^-1}
        g = SymbolElement.character(ctx, 1, -1)
        f2 = phi_solve(1, 0, g, Mode.CONVERGENT, prec=32)
        cross_ok = apply_symbol(parse("s-1", ctx), f2) == g
        cross = [growth_class(s).kind for _, _, s in f2.series_components()]
        return exact and kind == Q_EXPONENTIAL and cross_ok and cross == [GEOMETRIC], kind, cross

    (ok, kind, cross), dt = timed(run)
    report("q-Euler series", ok and dt < TIME_BUDGET, f"growth {kind}; cross-solve {cross}", dt)


# 4 ----------------------------------------------------------------------------

def test_newton_additivity(report):
    def run():
        rng = random.Random(1001)
        fails = 0
        for _ in range(200):
            P, Q = random_entire(rng, 3, CTX), random_entire(rng, 3, CTX)
            if newton_function(P * Q) != newton_function(P) + newton_function(Q):
                fails += 1
        return fails

    fails, dt = timed(run)
    report("Newton additivity", fails == 0 and dt < TIME_BUDGET, f"200 pairs, {fails} failures", dt)


# 5 ----------------------------------------------------------------------------

def test_char_multiplicativity(report):
    def run():
        rng = random.Random(1001)
        fails = literal = checks = 0
        for _ in range(200):
            P, Q = random_entire(rng, 3, CTX), random_entire(rng, 3, CTX)
            PQ = P * Q
            for mu in range(-3, 4):
                checks += 1
                lhs = char_equation(PQ, mu)
                if not lhs.equivalent(char_of_product(P, Q, mu)):
                    fails += 1
                if lhs.equivalent(char_equation(P, mu) * char_equation(Q, mu)):
                    literal += 1
        return fails, literal, checks

    (fails, literal, checks), dt = timed(run)
    detail = f"{checks} checks, {fails} failures; unrescaled product agrees in {literal}/{checks}"
    report("characteristic multiplicativity", fails == 0 and dt < TIME_BUDGET, detail, dt)


# 6 ----------------------------------------------------------------------------

def test_dual_calculus(report):
    def run():
        rng = random.Random(2002)
        fails = 0
        for _ in range(100):
            P = random_entire(rng, 3, CTX16, unitary=True)
            r = newton_function(P)
            via_formula = newton_module(from_operator(dual_operator(P)))
            via_matrix = newton_module(dual_module(from_operator(P)))
            if not (via_formula == via_matrix == nf_reflect(r)):
                fails += 1
        return fails

    fails, dt = timed(run)
    report("dual calculus", fails == 0 and dt < TIME_BUDGET, f"100 operators, {fails} failures", dt)


# 7 ----------------------------------------------------------------------------

def _rank_one(c, k, context) -> OrePoly:
    return OrePoly(context, {1: LaurentSeries.one(context), 0: LaurentSeries.monomial(context, -F(c), k)})


def _random_rank_two(rng: random.Random, context) -> OrePoly:
    return OrePoly(context, {k: random_coeff(rng, context) for k in range(3)})


def test_tensor_convolution(report):
    def run():
        fails = checks = 0
        rank_one = [_rank_one(c, k, CTX16) for k in range(-2, 3) for c in (1, 3)]
        for A in rank_one:
            for B in rank_one:
                checks += 1
                M = tensor(from_operator(A), from_operator(B))
                if newton_module(M) != nf_convolve(newton_function(A), newton_function(B)):
                    fails += 1
        rng = random.Random(3003)
        for _ in range(20):
            A, B = _random_rank_two(rng, CTX16), _random_rank_two(rng, CTX16)
            checks += 1
            M = tensor(from_operator(A), from_operator(B))
            if newton_module(M) != nf_convolve(newton_function(A), newton_function(B)):
                fails += 1
        return fails, checks

    (fails, checks), dt = timed(run)
    report("tensor convolution", fails == 0 and dt < TIME_BUDGET, f"{checks} pairs, {fails} failures", dt)


# 8 ----------------------------------------------------------------------------

def test_filtration_suite(report):
    def run():
        rng = random.Random(4004)
        fails = 0
        for _ in range(50):
            P, slopes = distinct_slope_product(rng, CTX16)
            filt = canonical_filtration(P, prec=16)
            r = newton_function(P)
            breaks = list(filt.breaks)
            cumulative = [sum(r(b) for b in breaks[: i + 1]) for i in range(len(breaks))]
            ok = (
                breaks == slopes
                and all(a > b for a, b in zip(breaks, breaks[1:]))
                and list(filt.ranks) == cumulative
                and all(filt.presentations[i] * filt.tower[i] == P for i in range(len(breaks)))
                and product(filt.quotient_ops, CTX16) == P
                and graded(P, prec=16).newton() == r
            )
            fails += not ok
        hs_fails = 0
        rng = random.Random(4005)
        for _ in range(20):
            P1, _ = distinct_slope_product(rng, CTX, 2)
            P2, _ = distinct_slope_product(rng, CTX, 2)
            _, C = cyclic_vector(tensor(from_operator(P1), from_operator(P2)))
            lhs = hilbert_samuel(graded(C, prec=32).newton())
            rhs = hilbert_samuel(newton_function(P1)) * hilbert_samuel(newton_function(P2))
            hs_fails += lhs != rhs
        return fails, hs_fails

    (fails, hs_fails), dt = timed(run)
    detail = f"50 products, {fails} failures; 20 tensor pairs, {hs_fails} Hilbert-Samuel failures"
    report("filtration suite", fails == 0 and hs_fails == 0 and dt < TIME_BUDGET, detail, dt)


# 9 ----------------------------------------------------------------------------

def _phi_op(d, nu, context) -> OrePoly:
    return OrePoly(context, {1: LaurentSeries.monomial(context, d, nu), 0: -1})


def test_solver_roundtrips(report):
    def run():
        rng = random.Random(5005)
        sm1 = parse("s-1", CTX16)
        one = F(1)
        integ_fails = 0
        for _ in range(100):
            deg = rng.randint(0, 3)
            g = tuple(
                LaurentSeries.from_dict(CTX16, {rng.randint(-2, 4): rng.choice([F(1), F(-2), F(1, 3)])
                                                for _ in range(rng.randint(0, 3))}, 16)
                for _ in range(deg + 1)
            )
            f = q_integrate_lq(g)
            lhs = apply_symbol(sm1, SymbolElement._canonical(CTX16, {(one, 0): f}))
            integ_fails += lhs != SymbolElement._canonical(CTX16, {(one, 0): g})
        # one representative family per case class: twisted character off q^Z,
        # on q^Z (log degree rises), m > 0 (formal recursion), m < 0
        cases = {"diagonal": (F(3), 0, (F(5, 4), 0)), "resonant": (F(2), 0, (F(1), 0)),
                 "log-raise": (F(1), 0, (F(1), 0)), "positive": (F(1), 1, (F(1), 0)),
                 "negative": (F(1, 2), -2, (F(3, 2), 1)), "theta": (F(1), 0, (F(1), -1))}
        phi_fails = 0
        for d, nu, key in cases.values():
            for _ in range(10):
                polys = tuple(LaurentSeries.from_dict(CTX16, {rng.randint(-1, 3): rng.choice([F(1), F(-3)])}, 16)
                              for _ in range(rng.randint(1, 3)))
                g = SymbolElement(CTX16, {key: polys})
                f = phi_solve(d, nu, g, Mode.FORMAL, prec=16)
                phi_fails += apply_symbol(_phi_op(d, nu, CTX16), f) != g
        boundary_fails = 0
        for theta in range(-3, 4):
            for nu in range(-3, 4):
                g = SymbolElement.character(CTX16, 1, theta)
                try:
                    phi_solve(1, nu, g, Mode.CONVERGENT, prec=16)
                    raised = False
                except DivergentDirection:
                    raised = True
                boundary_fails += raised != (theta + nu > 0)
        return integ_fails, phi_fails, boundary_fails

    (a, b, c), dt = timed(run)
    detail = f"q-integration {a}/100, phi_solve {b}/60, divergence boundary {c}/49 failures"
    report("q-integration and first-order solve roundtrips", a == b == c == 0 and dt < TIME_BUDGET, detail, dt)


# 10 ---------------------------------------------------------------------------

def test_formal_basis(report):
    def run():
        rng = random.Random(6006)
        fails = 0
        for _ in range(30):
            ops = [random_first_order(rng, rng.randint(-1, 1), CTX16) for _ in range(rng.randint(1, 3))]
            P = product(ops, CTX16)
            b = formal_basis(P, prec=16, verify=False)
            ok = (
                len(b) == P.deg_abs
                and all(apply_symbol(P, s).is_zero() for s in b)
                and not q_wronskian(b.elements).is_zero()
            )
            fails += not ok
        adams_fails = 0
        rng = random.Random(6007)
        for _ in range(10):
            P, _ = distinct_slope_product(rng, CTX)
            r = newton_function(P)
            a = adams_solutions(P)
            kinds = {g.kind for rec in a.growth() for g in rec.values() if g is not None}
            adams_fails += not (len(a) == r(r.first_slope) and kinds <= {GEOMETRIC})
        return fails, adams_fails

    (fails, adams_fails), dt = timed(run)
    detail = f"30 operators, {fails} failures; adams {adams_fails}/10 failures"
    report("formal basis", fails == 0 and adams_fails == 0 and dt < TIME_BUDGET, detail, dt)


# 11 ---------------------------------------------------------------------------

SAMPLES = [
    DIVERGENT, SPLIT, "s^2-z", "z^2*s-1", "z^-1*s-1", "(s-3)*((1-z)*s-1)",
    "(z*s-3)*(z^2*s-1)", "s^3-z", "(s-2)*(z^-1*s-1)", "(1+z)*s^2-z^-2",
]
FUCHSIAN = ["(s-3)*((1-z)*s-1)", "(1-z)*s-1/2", "s^2-3*s+5/4"]


def test_iterate_valuations(report):
    def run():
        worst = Fraction(0)
        for text in SAMPLES:
            P = parse(text, ctx)
            mu = newton_function(P).first_slope
            M = from_operator(P)
            vals = iterate_valuations(M, M.basis(0), range(1, 51))
            dev = [abs(v - mu * k) for k, v in zip(range(1, 51), vals)]
            worst = max(worst, max(dev))
        spread = 0
        for text in FUCHSIAN:
            M = from_operator(parse(text, ctx))
            vals = iterate_valuations(M, M.basis(0), range(-50, 51))
            spread = max(spread, max(vals) - min(vals))
        return worst, spread

    (C, spread), dt = timed(run)
    ok = C <= 2 and spread <= 2 and dt < TIME_BUDGET
    report("iterate valuations", ok, f"fitted C = {C} over 10 modules; fuchsian spread {spread}", dt)
