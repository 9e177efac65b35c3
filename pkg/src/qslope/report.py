"""JSON-ready records and the Newton polygon SVG."""
from __future__ import annotations

from fractions import Fraction
from typing import Any

from .exprs import format_operator, format_series
from .factor import Factorization, GrowthClass
from .filtration import GradedModule, SlopeFiltration
from .newton import CharEquation, ExponentData, NewtonFunction, polygon_vertices
from .qsolve import SolutionBasis, SymbolElement
from .series import LaurentSeries

SCALE = 40


def num(x) -> int | str:
    """Integral rationals as JSON ints, the rest as "num/den" strings."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def slopes_record(r: NewtonFunction) -> list:
    return [[num(mu), m] for mu, m in r.support]


def series_record(f: LaurentSeries) -> dict[str, Any]:
    return {
        "prec": None if f.is_exact else int(f.prec),
        "terms": [[k, num(c)] for k, c in f.terms()],
    }


def char_record(ch: CharEquation, exps: list[ExponentData]) -> dict[str, Any]:
    return {
        "slope": num(ch.slope),
        "coefficients": [[k, num(c)] for k, c in ch.coeffs],
        "exponents": [
            {"c": num(e.c), "cbar": num(e.cbar), "eps": e.eps, "multiplicity": e.multiplicity,
             "resonant": e.resonant}
            for e in exps
        ],
    }


def factorization_record(fac: Factorization, show_precision: bool = False) -> dict[str, Any]:
    return {
        "factors": [format_operator(F, show_precision) for F in fac.factors],
        "slopes": [None if s is None else num(s) for s in fac.slopes],
        "twists": [[format_series(u, show_precision) for u in tw] for tw in fac.twists],
    }


def filtration_record(filt: SlopeFiltration, show_precision: bool = False) -> dict[str, Any]:
    return {
        "breaks": [num(b) for b in filt.breaks],
        "ranks": list(filt.ranks),
        "quotients": [format_operator(R, show_precision) for R in filt.quotient_ops],
        "mode": filt.mode.value,
    }


def graded_record(gr: GradedModule, show_precision: bool = False) -> dict[str, Any]:
    return {str(num(mu)): format_operator(R, show_precision) for mu, R in gr.parts.items()}


def growth_record(g: GrowthClass | None) -> dict[str, Any]:
    if g is None:
        return {"kind": "unknown", "rate": None}
    return {"kind": g.kind, "rate": g.rate}


def symbol_record(s: SymbolElement, show_precision: bool = False) -> list[dict[str, Any]]:
    out = []
    for (cbar, theta) in s.keys():
        poly = s.components[(cbar, theta)]
        out.append({
            "cbar": num(cbar),
            "theta": theta,
            "lq_degree": len(poly) - 1,
            "series": [series_record(f) for f in poly],
            "text": [format_series(f, show_precision) for f in poly],
        })
    return out


def solutions_record(basis: SolutionBasis, show_precision: bool = False) -> list[dict[str, Any]]:
    growth = basis.growth()
    out = []
    for s, g, F in zip(basis.elements, growth, basis.provenance):
        kinds = {g_.kind if g_ is not None else "unknown" for g_ in g.values()}
        out.append({
            "factor": {"slope": num(F.slope), "c": num(F.c)},
            "components": symbol_record(s, show_precision),
            "growth": sorted(kinds),
        })
    return out


def _fmt(x: Fraction) -> str:
    return str(int(x)) if Fraction(x).denominator == 1 else f"{float(x):.3f}"


def newton_svg(r: NewtonFunction, scale: int = SCALE) -> str:
    """Lower Newton polygon on the integer lattice, one edge per slope."""
    verts = polygon_vertices(r)
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    pad = 1
    width = int((xmax - xmin + 2 * pad) * scale)
    height = int((ymax - ymin + 2 * pad) * scale)

    def px(x, y) -> tuple[str, str]:
        # SVG y grows downwards
        return _fmt((x - xmin + pad) * scale), _fmt((ymax - y + pad) * scale)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<g stroke="#ddd" stroke-width="1">',
    ]
    for gx in range(int(xmin) - pad, int(xmax) + pad + 1):
        x0, y0 = px(gx, ymax + pad)
        x1, y1 = px(gx, ymin - pad)
        lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
    for gy in range(int(ymin) - pad, int(ymax) + pad + 1):
        x0, y0 = px(xmin - pad, gy)
        x1, y1 = px(xmax + pad, gy)
        lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
    lines.append("</g>")
    pts = " ".join(",".join(px(x, y)) for x, y in verts)
    lines.append(f'<polyline fill="none" stroke="black" stroke-width="2" points="{pts}"/>')
    for x, y in verts:
        cx, cy = px(x, y)
        lines.append(f'<circle cx="{cx}" cy="{cy}" r="3"/>')
    for (x0, y0), (x1, y1), (mu, m) in zip(verts, verts[1:], r.support):
        tx, ty = px((x0 + x1) / 2, (y0 + y1) / 2)
        label = f"{mu}" if m == 1 else f"{mu} (x{m})"
        lines.append(f'<text x="{tx}" y="{ty}" dy="-6" font-size="12" text-anchor="middle">{label}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
