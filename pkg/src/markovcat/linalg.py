"""Exact linear algebra over the rationals (row echelon form, rank, null space)."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns, by Gauss-Jordan elimination."""
    A = [[Fraction(v) for v in row] for row in rows]
    if not A:
        return [], []
    m, n = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                k = A[i][c]
                A[i] = [a - k * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{v : A v = 0}``, one vector per free column."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, pivots = rref(rows)
    n = len(R[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def left_nullspace(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of ``{b : b^T A = 0}``."""
    m = len(rows)
    cols = [list(c) for c in zip(*rows)] if rows and rows[0] else []
    return nullspace(cols, ncols=m)


def primitive(v: Sequence[Fraction]) -> list[int]:
    """Scale a nonzero rational vector to coprime integers with first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    return [-x for x in ints] if first < 0 else ints
