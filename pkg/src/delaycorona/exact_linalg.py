"""Small dense linear algebra over the rationals (Fraction entries, lists of rows)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Mat = list[list[Fraction]]


def zeros(n: int, m: int) -> Mat:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Mat:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Mat:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col) if x and y), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def transpose(a: Sequence[Sequence[Fraction]]) -> Mat:
    return [list(c) for c in zip(*a)]


def rref(a: Sequence[Sequence[Fraction]]) -> tuple[Mat, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(map(Fraction, r)) for r in a]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        p = next((r for r in range(row, n_rows) if m[r][col] != 0), None)
        if p is None:
            continue
        m[row], m[p] = m[p], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(n_rows):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    return m, pivots


def rank(a: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(a)[1]) if a and a[0] else 0


def inverse(a: Sequence[Sequence[Fraction]]) -> Mat:
    n = len(a)
    aug = [list(map(Fraction, r)) + e for r, e in zip(a, identity(n))]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [r[n:] for r in red]


def solve_any(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """One solution of ``a x = b`` (free variables zero), or ``None`` if inconsistent."""
    n_cols = len(a[0]) if a else 0
    aug = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(a, b)]
    red, piv = rref(aug)
    if n_cols in piv:
        return None
    x = [Fraction(0)] * n_cols
    for r, c in enumerate(piv):
        x[c] = red[r][n_cols]
    return x


def left_null_space(a: Sequence[Sequence[Fraction]]) -> Mat:
    """Basis of ``{w : w a = 0}``."""
    return null_space(transpose(a)) if a and a[0] else identity(len(a))


def null_space(a: Sequence[Sequence[Fraction]]) -> Mat:
    n_cols = len(a[0]) if a else 0
    red, piv = rref(a)
    free = [c for c in range(n_cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        basis.append(v)
    return basis


def min_norm_solution(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Minimum Euclidean-norm solution of ``a x = b`` via ``x = a^T y``, ``a a^T y = b``."""
    at = transpose(a)
    y = solve_any(matmul(a, at), b)
    if y is None:
        return None
    x = matvec(at, y)
    if matvec(a, x) != [Fraction(v) for v in b]:
        return None
    return x
