"""Exact rational linear algebra.

Matrices are lists of rows.  ``rank`` accepts dense rows or sparse
``{column: value}`` rows and eliminates fraction-free over the integers.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


def _sparse_int(row) -> dict[int, int]:
    items = row.items() if isinstance(row, dict) else enumerate(row)
    items = [(c, Fraction(v)) for c, v in items if v]
    if not items:
        return {}
    den = lcm(*(v.denominator for _, v in items))
    out = {c: int(v * den) for c, v in items}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {c: v // g for c, v in row.items()} if g > 1 else row


class RowSpace:
    """Incrementally maintained echelon basis of a row space."""

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, row) -> dict[int, int]:
        row = _sparse_int(row) if not _is_int_sparse(row) else row
        while row:
            col = min(row)
            piv = self.pivots.get(col)
            if piv is None:
                return row
            a, b = piv[col], row[col]
            new = {}
            for c in row.keys() | piv.keys():
                v = a * row.get(c, 0) - b * piv.get(c, 0)
                if v:
                    new[c] = v
            row = _primitive(new)
        return row

    def add(self, row) -> bool:
        """Insert a row; return True when it enlarged the span."""
        row = self.reduce(row)
        if not row:
            return False
        self.pivots[min(row)] = row
        return True


def _is_int_sparse(row) -> bool:
    return isinstance(row, dict) and all(type(v) is int for v in row.values())


def rank(rows: Iterable) -> int:
    space = RowSpace()
    for row in rows:
        space.add(row)
    return len(space)


def rref(matrix: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    m = [[Fraction(v) for v in row] for row in matrix]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(matrix: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {v : matrix·v = 0}."""
    red, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None, cols: int | None = None) -> Matrix:
    """Product with explicit shapes so empty factors compose correctly."""
    if inner is None:
        inner = len(b)
    if cols is None:
        cols = len(b[0]) if b else 0
    return [[sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
            for row in a]


def is_zero(m: Matrix) -> bool:
    return all(not v for row in m for v in row)
