"""Command-line front end: ``qslope <command> EXPR [options]``.

Exit codes: 0 success, 2 parse or usage error, 3 insufficient precision,
4 unsupported input, 5 divergent direction in convergent mode, 1 any other
library error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from . import report
from .errors import (
    DivergentDirection,
    ExactRootUnavailable,
    InsufficientData,
    InsufficientPrecision,
    IrrationalExponent,
    NonIntegralSlope,
    NotFirstSlope,
    ParseError,
    PreconditionViolated,
    QSlopeError,
)
from .exprs import format_operator, parse
from .factor import Mode, birkhoff_guenther, factor_slope, first_order_factorization, growth_class
from .filtration import canonical_filtration, graded, hilbert_samuel
from .newton import char_equation, exponents_of, newton_function, nf_convolve
from .ore import OrePoly, ramify_ore
from .qmodule import dual_operator, from_operator, newton_module, tensor
from .qsolve import (
    SolutionBasis,
    adams_solutions,
    formal_basis,
    phi_solve,
    q_wronskian,
    solutions_from_factors,
)
from .series import QContext

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_PRECISION = 3
EXIT_UNSUPPORTED = 4
EXIT_DIVERGENT = 5

_EXIT_CODES: list[tuple[type, int]] = [
    (ParseError, EXIT_PARSE),
    (InsufficientPrecision, EXIT_PRECISION),
    (IrrationalExponent, EXIT_UNSUPPORTED),
    (ExactRootUnavailable, EXIT_UNSUPPORTED),
    (NonIntegralSlope, EXIT_UNSUPPORTED),
    (NotFirstSlope, EXIT_UNSUPPORTED),
    (PreconditionViolated, EXIT_UNSUPPORTED),
    (DivergentDirection, EXIT_DIVERGENT),
]


def exit_code_for(exc: BaseException) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_ERROR


@dataclass(frozen=True)
class RunConfig:
    qbase: Fraction = Fraction(2)
    qexp: int = 1
    prec: int = 32
    mode: Mode = Mode.CONVERGENT
    output: str = "json"
    ramify: int = 1
    show_precision: bool = False

    def __post_init__(self) -> None:
        if abs(Fraction(self.qbase) ** self.qexp) <= 1:
            raise ValueError("need |q| > 1")
        if self.prec < 4:
            raise ValueError("precision must be at least 4")
        if self.ramify < 1:
            raise ValueError("ramification level must be positive")

    def context(self) -> QContext:
        return QContext(self.qbase, self.qexp, self.prec)


def _operator(text: str, cfg: RunConfig) -> OrePoly:
    P = parse(text, cfg.context())
    if cfg.ramify > 1:
        P = ramify_ore(P, cfg.ramify)
    return P


def _text_lines(rec: dict[str, Any]) -> str:
    lines = []
    for k, v in rec.items():
        lines.append(f"{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    return "\n".join(lines)


# commands ---------------------------------------------------------------------

def cmd_newton(args, cfg: RunConfig) -> dict[str, Any] | str:
    r = newton_function(_operator(args.expr, cfg))
    if cfg.output == "svg":
        return report.newton_svg(r)
    return {"slopes": report.slopes_record(r)}


def cmd_charq(args, cfg: RunConfig):
    P = _operator(args.expr, cfg)
    if args.slope is None:
        slopes = newton_function(P).slopes
    else:
        slopes = [Fraction(args.slope)]
    out = []
    for mu in slopes:
        ch = char_equation(P, mu)
        out.append(report.char_record(ch, exponents_of(ch, P.ctx)))
    return {"char": out}


def cmd_factor(args, cfg: RunConfig):
    P = _operator(args.expr, cfg)
    if args.slope is None:
        raise PreconditionViolated("factor needs --slope")
    fac = factor_slope(P, Fraction(args.slope), cfg.mode, cfg.prec)
    return report.factorization_record(fac, cfg.show_precision)


def cmd_bg(args, cfg: RunConfig):
    fac = birkhoff_guenther(_operator(args.expr, cfg), cfg.mode, cfg.prec)
    return report.factorization_record(fac, cfg.show_precision)


def cmd_filtrate(args, cfg: RunConfig):
    filt = canonical_filtration(_operator(args.expr, cfg), cfg.mode, cfg.prec)
    return {"filtration": report.filtration_record(filt, cfg.show_precision)}


def cmd_gr(args, cfg: RunConfig):
    P = _operator(args.expr, cfg)
    gr = graded(P, cfg.mode, cfg.prec)
    return {"graded": report.graded_record(gr, cfg.show_precision),
            "hilbert_samuel": str(hilbert_samuel(gr.newton()))}


def cmd_solve(args, cfg: RunConfig):
    P = _operator(args.expr, cfg)
    if args.rhs is not None:
        rhs = _operator(args.rhs, cfg)
        if P.lo != 0 or P.hi != 1 or any(len(P.coeff(k).coeffs) != 1 for k in (0, 1)):
            raise PreconditionViolated("--rhs needs an operator a*z^k*s + b*z^j with monomial coefficients")
        A, B = P.coeff(1), P.coeff(0)
        a, k = A.leading, A.val
        b, j = B.leading, B.val
        # a z^k sigma f + b z^j f = g  <=>  (-a/b) z^(k-j) sigma f - f = -g z^(-j) / b
        g = rhs.coeff(0).shift(-j).scale(-1 / b)
        f = phi_solve(-a / b, k - j, g, cfg.mode, cfg.prec, P.ctx)
        return {"solution": report.symbol_record(f, cfg.show_precision),
                "growth": _growth_of(f)}
    if cfg.mode is Mode.FORMAL:
        basis = formal_basis(P, cfg.prec)
    else:
        _, pieces = first_order_factorization(P, Mode.FORMAL, cfg.prec)
        basis = solutions_from_factors(pieces, Mode.CONVERGENT, cfg.prec)
    return {"solutions": report.solutions_record(basis, cfg.show_precision)}


def _growth_of(f) -> list[dict[str, Any]]:
    out = []
    for key, k, s in f.series_components():
        if not s.is_zero():
            try:
                out.append(report.growth_record(growth_class(s)))
            except InsufficientData:
                out.append(report.growth_record(None))
    return out


def cmd_adams(args, cfg: RunConfig):
    basis = adams_solutions(_operator(args.expr, cfg), cfg.prec)
    return {"solutions": report.solutions_record(basis, cfg.show_precision)}


def cmd_tensor(args, cfg: RunConfig):
    P1 = _operator(args.expr, cfg)
    P2 = _operator(args.other, cfg)
    M = tensor(from_operator(P1), from_operator(P2))
    r = newton_module(M)
    conv = nf_convolve(newton_function(P1), newton_function(P2))
    return {"slopes": report.slopes_record(r), "convolution": report.slopes_record(conv),
            "hilbert_samuel": str(hilbert_samuel(r))}


def cmd_dual(args, cfg: RunConfig):
    P = _operator(args.expr, cfg)
    D = dual_operator(P)
    return {"dual": format_operator(D, cfg.show_precision),
            "slopes": report.slopes_record(newton_function(D))}


def cmd_wronskian(args, cfg: RunConfig):
    basis: SolutionBasis = formal_basis(_operator(args.expr, cfg), cfg.prec)
    W = q_wronskian(basis.elements)
    return {"wronskian": report.symbol_record(W, cfg.show_precision), "nonzero": not W.is_zero()}


COMMANDS: dict[str, Callable] = {
    "newton": cmd_newton,
    "charq": cmd_charq,
    "factor": cmd_factor,
    "bg": cmd_bg,
    "filtrate": cmd_filtrate,
    "gr": cmd_gr,
    "solve": cmd_solve,
    "adams": cmd_adams,
    "tensor": cmd_tensor,
    "dual": cmd_dual,
    "wronskian": cmd_wronskian,
}


# argument handling --------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps subparser defaults from overwriting options given before the command
    S = argparse.SUPPRESS
    p.add_argument("--q", dest="q", default=S, help="q as a rational (sets qbase=q, qpow=1)")
    p.add_argument("--qbase", default=S, help="base of q = qbase^qpow")
    p.add_argument("--qpow", type=int, default=S, help="exponent of q = qbase^qpow")
    p.add_argument("--prec", type=int, default=S, help="truncation order (env QSLOPE_PREC)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=S)
    p.add_argument("--out", choices=["json", "text", "svg"], default=S)
    p.add_argument("--svg", action="store_true", default=S, help="shorthand for --out svg")
    p.add_argument("--ramify", type=int, default=S, help="ramification level l (needs qpow divisible by l)")
    p.add_argument("--show-precision", action="store_true", default=S, help="print O(z^n) terms")
    p.add_argument("--batch", default=S, metavar="FILE", help="one expression per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qslope", description="Slopes, factorizations and solutions of q-difference operators.")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        p.add_argument("expr", nargs=None if name == "tensor" else "?")
        if name == "tensor":
            p.add_argument("other")
        if name in ("charq", "factor"):
            p.add_argument("--slope", default=None)
        if name == "solve":
            p.add_argument("--rhs", default=None, help="right-hand side for first-order operators")
    return parser


def config_from_args(ns: argparse.Namespace, env=None) -> RunConfig:
    env = os.environ if env is None else env
    prec = getattr(ns, "prec", None)
    if prec is None:
        prec = int(env["QSLOPE_PREC"]) if env.get("QSLOPE_PREC") else 32
    qbase, qexp = Fraction(2), 1
    if getattr(ns, "q", None) is not None:
        qbase = Fraction(ns.q)
    if getattr(ns, "qbase", None) is not None:
        qbase = Fraction(ns.qbase)
    if getattr(ns, "qpow", None) is not None:
        qexp = ns.qpow
    out = "svg" if getattr(ns, "svg", False) else getattr(ns, "out", "json")
    return RunConfig(
        qbase=qbase,
        qexp=qexp,
        prec=prec,
        mode=Mode(getattr(ns, "mode", Mode.CONVERGENT.value)),
        output=out,
        ramify=getattr(ns, "ramify", 1),
        show_precision=getattr(ns, "show_precision", False),
    )


def _render(result, cfg: RunConfig) -> str:
    if isinstance(result, str):
        return result
    if cfg.output == "text":
        return _text_lines(result) + "\n"
    return json.dumps(result, sort_keys=True) + "\n"


def run_one(command: str, ns: argparse.Namespace, cfg: RunConfig) -> tuple[int, Any]:
    """(exit code, result or error record) for a single expression."""
    try:
        return EXIT_OK, COMMANDS[command](ns, cfg)
    except QSlopeError as exc:
        rec = {"error": type(exc).__name__, "message": str(exc)}
        return exit_code_for(exc), rec


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
    except (ValueError, ArithmeticError) as exc:
        print(f"qslope: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if cfg.output == "svg" and ns.command != "newton":
        print("qslope: --out svg is only available for newton", file=sys.stderr)
        return EXIT_PARSE
    batch = getattr(ns, "batch", None)
    if batch is None:
        if ns.expr is None:
            print("qslope: an expression is required", file=sys.stderr)
            return EXIT_PARSE
        code, result = run_one(ns.command, ns, cfg)
        if code:
            print(f"qslope: {result['error']}: {result['message']}", file=sys.stderr)
            return code
        sys.stdout.write(_render(result, cfg))
        return EXIT_OK
    with open(batch, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    worst = EXIT_OK
    records = []
    for line in lines:
        sub = argparse.Namespace(**vars(ns))
        sub.expr = line
        code, result = run_one(ns.command, sub, cfg)
        worst = worst or code
        records.append({"input": line, "code": code, "result": result})
    if cfg.output == "text":
        for rec in records:
            sys.stdout.write(f"# {rec['input']}\n{_render(rec['result'], cfg)}")
    else:
        sys.stdout.write(json.dumps(records, sort_keys=True) + "\n")
    return worst


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
