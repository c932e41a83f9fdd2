"""Exact determinants and linear solves over the rationals.

Rows are lifted to integers by clearing denominators, then eliminated with
Bareiss' fraction-free scheme, so intermediate entries stay integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .kernel import Rat


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(Rat(x) for r in rows for x in r))

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]


@dataclass(frozen=True)
class LinearSystem:
    a: Matrix
    b: tuple

    def __post_init__(self):
        if self.a.rows != self.a.cols:
            raise ValueError("linear system must be square")
        if len(self.b) != self.a.rows:
            raise ValueError("right-hand side has the wrong length")


def _integer_rows(rows):
    """Scale each row by the lcm of its denominators; return rows and scales."""
    out, scales = [], []
    for r in rows:
        s = lcm(*(int(Rat(x).denominator) for x in r)) if r else 1
        out.append([int(Rat(x) * s) for x in r])
        scales.append(s)
    return out, scales


def _bareiss(m: list, ncols_pivot: int):
    """In-place fraction-free elimination; returns (sign, last pivot) or raises."""
    n = len(m)
    sign = 1
    prev = 1
    for k in range(ncols_pivot):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0, 0
        pk = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, len(rowi)):
                rowi[j] = (pk * rowi[j] - mik * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    return sign, prev


def det(m: Matrix) -> Rat:
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    if m.rows == 0:
        return Rat(1)
    rows, scales = _integer_rows(m.to_rows())
    sign, last = _bareiss(rows, m.rows)
    denom = 1
    for s in scales:
        denom *= s
    return Rat(sign * last, denom)


def solve(sys: LinearSystem) -> list:
    """Exact solution of ``a x = b``; singular input raises."""
    n = sys.a.rows
    aug = [list(r) + [sys.b[i]] for i, r in enumerate(sys.a.to_rows())]
    rows, _ = _integer_rows(aug)
    sign, _ = _bareiss(rows, n)
    if sign == 0:
        raise SingularSystemError("Virasoro system singular")
    x = [Rat(0)] * n
    for i in range(n - 1, -1, -1):
        s = Rat(rows[i][n])
        for j in range(i + 1, n):
            s -= rows[i][j] * x[j]
        x[i] = s / rows[i][i]
    return x
