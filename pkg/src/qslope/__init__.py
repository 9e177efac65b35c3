"""Newton polygons, slope factorizations and formal solutions of q-difference operators."""
from __future__ import annotations

from .errors import QSlopeError
from .exprs import format_operator, format_series, parse
from .factor import (
    Factorization,
    FirstOrderFactor,
    Mode,
    birkhoff_guenther,
    factor_slope,
    first_order_factorization,
    formal_pure_parts,
    growth_class,
    peel_exponent,
    series_solution,
)
from .filtration import canonical_filtration, f_geq, graded, hilbert_samuel
from .newton import NewtonFunction, char_equation, exponents, newton_function, nf_add, nf_convolve, nf_reflect
from .ore import GaugeSymbol, OrePoly, gauge, ramify_ore, right_divide
from .qmodule import QDiffModule, cyclic_vector, dual, from_equation, from_operator, is_morphism, tensor
from .qsolve import (
    SolutionBasis,
    SymbolElement,
    adams_solutions,
    apply_symbol,
    formal_basis,
    phi_solve,
    q_integrate_lq,
    q_wronskian,
)
from .series import INF, LaurentSeries, QContext, series

__version__ = "0.1.0"
