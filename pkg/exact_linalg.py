"""
Exact Linear Algebra
Fraction-free determinants and ranks, and symmetric-pivoted LDL^T over the rationals

Nothing in here touches floating point. Matrices are plain lists of rows whose
entries are anything Fraction() accepts (int, Fraction, "a/b" strings).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

logger = logging.getLogger(__name__)

Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    """Copy a matrix into a list of lists of Fraction"""
    return [[Fraction(x) for x in row] for row in rows]


def is_symmetric(rows: Sequence[Sequence]) -> bool:
    n = len(rows)
    if any(len(row) != n for row in rows):
        return False
    return all(rows[i][j] == rows[j][i] for i in range(n) for j in range(i + 1, n))


def _integer_rows(rows: Sequence[Sequence]) -> Tuple[List[List[int]], int]:
    """
    Clear denominators row by row

    Returns:
        (integer rows, product of the row multipliers)
    """
    int_rows = []
    scale = 1
    for row in rows:
        fracs = [Fraction(x) for x in row]
        mult = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        int_rows.append([int(f * mult) for f in fracs])
        scale *= mult
    return int_rows, scale


def _bareiss_echelon(A: List[List[int]]) -> Tuple[int, int, List[List[int]]]:
    """
    Fraction-free Gaussian elimination in place

    Returns:
        (rank, sign of the row permutation, eliminated matrix)
    """
    m = len(A)
    ncols = len(A[0]) if m else 0
    rank = 0
    sign = 1
    prev = 1
    for col in range(ncols):
        pivot_row = next((r for r in range(rank, m) if A[r][col] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != rank:
            A[rank], A[pivot_row] = A[pivot_row], A[rank]
            sign = -sign
        piv = A[rank][col]
        top = A[rank]
        for r in range(rank + 1, m):
            row = A[r]
            lead = row[col]
            for c in range(col + 1, ncols):
                row[c] = (piv * row[c] - lead * top[c]) // prev
            row[col] = 0
        prev = piv
        rank += 1
        if rank == m:
            break
    return rank, sign, A


def determinant(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square rational matrix (Bareiss)"""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in rows):
        raise ValueError(f"determinant needs a square matrix, got {n} rows of lengths {[len(r) for r in rows]}")
    A, scale = _integer_rows(rows)
    rank, sign, A = _bareiss_echelon(A)
    if rank < n:
        return Fraction(0)
    return Fraction(sign * A[n - 1][n - 1], scale)


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix (any shape)"""
    if not rows or not rows[0]:
        return 0
    A, _ = _integer_rows(rows)
    r, _, _ = _bareiss_echelon(A)
    return r


@dataclass
class LDLFactorization:
    """
    Symmetric-pivoted LDL^T of a rational symmetric matrix

    The matrix equals sum_k d_k * l_k l_k^T over the 1x1 pivots plus the
    contributions of the 2x2 blocks. `columns` holds (pivot index, d, l) for the
    1x1 pivots, `blocks` holds (i, j, b) for 2x2 pivots [[0, b], [b, 0]].
    """
    size: int
    columns: List[Tuple[int, Fraction, List[Fraction]]] = field(default_factory=list)
    blocks: List[Tuple[int, int, Fraction]] = field(default_factory=list)
    zero: int = 0

    @property
    def signature(self) -> Tuple[int, int, int]:
        pos = sum(1 for _, d, _ in self.columns if d > 0) + len(self.blocks)
        neg = sum(1 for _, d, _ in self.columns if d < 0) + len(self.blocks)
        return pos, neg, self.zero

    @property
    def rank(self) -> int:
        return len(self.columns) + 2 * len(self.blocks)

    @property
    def is_psd(self) -> bool:
        return not self.blocks and all(d > 0 for _, d, _ in self.columns)


def ldl_decompose(rows: Sequence[Sequence]) -> LDLFactorization:
    """
    Exact LDL^T with symmetric pivoting

    1x1 pivots are chosen by largest |a_ii| on the remaining Schur complement,
    ties broken by smallest index. When every remaining diagonal entry is zero
    but an off-diagonal one is not, the first such pair (i, j) is taken as a
    2x2 pivot, contributing one positive and one negative square.
    """
    if not is_symmetric(rows):
        raise ValueError("ldl_decompose needs a symmetric square matrix")
    n = len(rows)
    S = to_fraction_matrix(rows)
    remaining = list(range(n))
    result = LDLFactorization(size=n)

    while remaining:
        p = max(remaining, key=lambda i: (abs(S[i][i]), -i))
        if S[p][p] != 0:
            d = S[p][p]
            col = [Fraction(0)] * n
            for i in remaining:
                col[i] = S[i][p] / d
            remaining.remove(p)
            for k in remaining:
                f = S[k][p] / d
                if f == 0:
                    continue
                for l in remaining:
                    S[k][l] -= f * S[p][l]
            result.columns.append((p, d, col))
            continue

        pair = next(((i, j) for a, i in enumerate(remaining) for j in remaining[a + 1:] if S[i][j] != 0), None)
        if pair is None:
            result.zero = len(remaining)
            break
        i, j = pair
        b = S[i][j]
        remaining.remove(i)
        remaining.remove(j)
        ci = [S[k][i] for k in range(n)]
        cj = [S[k][j] for k in range(n)]
        for k in remaining:
            for l in remaining:
                S[k][l] -= (ci[k] * cj[l] + cj[k] * ci[l]) / b
        result.blocks.append((i, j, b))

    return result


def signature(rows: Sequence[Sequence]) -> Tuple[int, int, int]:
    """(positive, negative, zero) inertia of a rational symmetric matrix"""
    return ldl_decompose(rows).signature


def is_positive_semidefinite(rows: Sequence[Sequence]) -> bool:
    return ldl_decompose(rows).is_psd
