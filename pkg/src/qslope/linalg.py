"""Small dense matrices over truncated Laurent series."""
from __future__ import annotations

from typing import Sequence

from .errors import DivisionByZeroSeries, ShapeMismatch
from .series import LaurentSeries, QContext

Matrix = tuple[tuple[LaurentSeries, ...], ...]
Vector = tuple[LaurentSeries, ...]


def as_matrix(ctx: QContext, rows: Sequence[Sequence]) -> Matrix:
    out = []
    for row in rows:
        out.append(tuple(x if isinstance(x, LaurentSeries) else LaurentSeries.monomial(ctx, x, 0)
                         if x != 0 else LaurentSeries.zero(ctx) for x in row))
    n = len(out[0]) if out else 0
    if any(len(r) != n for r in out):
        raise ShapeMismatch("ragged matrix")
    return tuple(out)


def _exact_zero(a: LaurentSeries) -> bool:
    return not a.coeffs and a.is_exact


def identity(ctx: QContext, n: int) -> Matrix:
    one, zero = LaurentSeries.one(ctx), LaurentSeries.zero(ctx)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def zeros(ctx: QContext, n: int, m: int | None = None) -> Matrix:
    zero = LaurentSeries.zero(ctx)
    return tuple(tuple(zero for _ in range(m if m is not None else n)) for _ in range(n))


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ShapeMismatch(f"cannot multiply {n}x{k} by {k2}x{m}")
    ctx = A[0][0].ctx
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = LaurentSeries.zero(ctx)
            for t in range(k):
                a, b = A[i][t], B[t][j]
                if _exact_zero(a) or _exact_zero(b):
                    continue
                s = s + a * b
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_vec(A: Matrix, x: Sequence[LaurentSeries]) -> Vector:
    if shape(A)[1] != len(x):
        raise ShapeMismatch("matrix/vector size mismatch")
    ctx = A[0][0].ctx
    out = []
    for row in A:
        s = LaurentSeries.zero(ctx)
        for a, b in zip(row, x):
            if not (_exact_zero(a) or _exact_zero(b)):
                s = s + a * b
        out.append(s)
    return tuple(out)


def sigma_mat(A: Matrix, k: int = 1) -> Matrix:
    return tuple(tuple(a.sigma(k) for a in row) for row in A)


def sigma_vec(x: Sequence[LaurentSeries], k: int = 1) -> Vector:
    return tuple(a.sigma(k) for a in x)


def kron(A: Matrix, B: Matrix) -> Matrix:
    n, m = shape(A)
    p, r = shape(B)
    rows = []
    for i in range(n):
        for k in range(p):
            rows.append(tuple(A[i][j] * B[k][l] for j in range(m) for l in range(r)))
    return tuple(rows)


def mat_eq(A: Matrix, B: Matrix) -> bool:
    if shape(A) != shape(B):
        return False
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def _pivot(col: list[tuple[int, LaurentSeries]]):
    best = None
    for i, a in col:
        if a.coeffs and (best is None or (a.val, len(a.coeffs)) < (best[1].val, len(best[1].coeffs))):
            best = (i, a)
    return best


def det(A: Matrix) -> LaurentSeries:
    """Determinant by elimination with minimal-valuation pivots."""
    n, m = shape(A)
    if n != m:
        raise ShapeMismatch("determinant of a non-square matrix")
    ctx = A[0][0].ctx
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    M = [list(r) for r in A]
    d = LaurentSeries.one(ctx)
    for c in range(n):
        piv = _pivot([(i, M[i][c]) for i in range(c, n)])
        if piv is None:
            prec = min((M[i][c].prec for i in range(c, n)))
            return d * LaurentSeries.zero(ctx, prec)
        i, p = piv
        if i != c:
            M[c], M[i] = M[i], M[c]
            d = -d
        d = d * p
        pinv = p.inverse()
        for r in range(c + 1, n):
            f = M[r][c]
            if not f.coeffs:
                continue
            f = f * pinv
            M[r] = [M[r][j] - f * M[c][j] if j > c else M[r][j] for j in range(n)]
    return d


def solve(A: Matrix, b: Sequence[LaurentSeries]) -> Vector:
    """x with A x = b for square invertible A."""
    n, m = shape(A)
    if n != m or len(b) != n:
        raise ShapeMismatch("solve needs a square system")
    M = [list(r) + [b[i]] for i, r in enumerate(A)]
    for c in range(n):
        piv = _pivot([(i, M[i][c]) for i in range(c, n)])
        if piv is None:
            raise DivisionByZeroSeries("singular matrix to precision")
        i, p = piv
        M[c], M[i] = M[i], M[c]
        pinv = p.inverse()
        M[c] = [x * pinv for x in M[c]]
        for r in range(n):
            if r == c or not M[r][c].coeffs:
                continue
            f = M[r][c]
            M[r] = [M[r][j] - f * M[c][j] for j in range(n + 1)]
    return tuple(M[i][n] for i in range(n))


def inverse(A: Matrix) -> Matrix:
    n, _ = shape(A)
    ctx = A[0][0].ctx
    if n == 1:
        return ((A[0][0].inverse(),),)
    I = identity(ctx, n)
    cols = [solve(A, [I[i][j] for i in range(n)]) for j in range(n)]
    return transpose(tuple(cols))


def rank(vectors: Sequence[Sequence[LaurentSeries]]) -> int:
    """Rank of a family of vectors, zero-to-precision entries treated as 0."""
    M = [list(v) for v in vectors]
    if not M:
        return 0
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = _pivot([(i, M[i][c]) for i in range(r, len(M))])
        if piv is None:
            continue
        i, p = piv
        M[r], M[i] = M[i], M[r]
        pinv = p.inverse()
        for k in range(r + 1, len(M)):
            f = M[k][c]
            if not f.coeffs:
                continue
            f = f * pinv
            M[k] = [M[k][j] - f * M[r][j] for j in range(ncols)]
        r += 1
        if r == len(M):
            break
    return r
