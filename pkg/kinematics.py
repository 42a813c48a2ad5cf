"""
Kinematics
Exact kinematic invariants of n-gon configurations, embedding-space Gram data,
genericity / Euclidean decision procedures and the edge-merging map.

Edges and external legs are indexed 1..n. The point at infinity of the
compactified momentum space is the index INFINITY.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

import exact_linalg
from engine_config import EngineConfig
from errors import EngineError

logger = logging.getLogger(__name__)

INFINITY = 'inf'

Index = Union[int, str]


class KinematicsError(EngineError):
    """Invalid or unsuitable kinematic data"""
    pass


class NotSymmetric(KinematicsError):
    pass


class RowSumNonzero(KinematicsError):
    pass


class DimensionMismatch(KinematicsError):
    pass


class MomentumNotConserved(KinematicsError):
    pass


class IndexOutOfRange(KinematicsError):
    pass


class NotEuclidean(KinematicsError):
    pass


class ToleranceUnachievable(KinematicsError):
    pass


class AllEdgesPinched(KinematicsError):
    pass


@dataclass(frozen=True)
class KinematicPoint:
    """Exact invariants s_ij = p_i.p_j and m_i^2 of an n-gon configuration"""
    n: int
    s: Tuple[Tuple[Fraction, ...], ...]
    m2: Tuple[Fraction, ...]

    def s_entry(self, i: int, j: int) -> Fraction:
        """s_ij with 1-based indices"""
        return self.s[i - 1][j - 1]

    def mass_sq(self, i: int) -> Fraction:
        return self.m2[i - 1]


@dataclass(frozen=True)
class GramData:
    """Gram matrix <u_i, u_j> over an ordered index list and its determinant"""
    subset: Tuple[Index, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    det: Fraction


@dataclass
class GenericityReport:
    is_generic: bool
    d: int
    failures: List[Tuple[Tuple[Index, ...], Fraction]]
    rank_ok: bool
    s_rank: int = 0


@dataclass
class EuclideanReport:
    """Outcome of the Euclidean-region decision procedure"""
    is_euclidean: bool
    d: int
    psd: bool
    s_rank: int
    masses_positive: bool
    genericity: GenericityReport

    def __bool__(self) -> bool:
        return self.is_euclidean


@dataclass
class RealizedMomenta:
    """Floating-point momenta in R^d realizing exact invariants"""
    d: int
    vectors: np.ndarray
    residual: float

    def partial_sums(self) -> np.ndarray:
        """Rows P_{1,i} = p_1 + ... + p_i for i = 1..n"""
        return np.cumsum(self.vectors, axis=0)


def _check_even_dimension(d: int) -> None:
    if not isinstance(d, int) or d < 2 or d % 2:
        raise ValueError(f"dimension d must be an even integer >= 2, got {d!r}")


def index_sort_key(index: Index):
    """Sort key placing INFINITY after all edge indices"""
    return (1, 0) if index == INFINITY else (0, index)


def from_invariants(n: int, s: Sequence[Sequence], m2: Sequence) -> KinematicPoint:
    """
    Build a validated KinematicPoint

    Args:
        n: number of edges (n >= 1)
        s: n x n matrix of s_ij = p_i.p_j
        m2: length-n vector of mass squares

    Raises:
        DimensionMismatch, NotSymmetric, RowSumNonzero
    """
    if not isinstance(n, int) or n < 1:
        raise DimensionMismatch(f"n must be a positive integer, got {n!r}")
    if len(s) != n or any(len(row) != n for row in s):
        raise DimensionMismatch(f"s must be {n}x{n}, got rows of lengths {[len(row) for row in s]}")
    if len(m2) != n:
        raise DimensionMismatch(f"m2 must have length {n}, got {len(m2)}")

    s_exact = tuple(tuple(Fraction(x) for x in row) for row in s)
    m2_exact = tuple(Fraction(x) for x in m2)

    for i in range(n):
        for j in range(i + 1, n):
            if s_exact[i][j] != s_exact[j][i]:
                raise NotSymmetric(
                    f"s must be symmetric: s[{i + 1}][{j + 1}]={s_exact[i][j]} != s[{j + 1}][{i + 1}]={s_exact[j][i]}"
                )
    for i, row in enumerate(s_exact):
        total = sum(row, Fraction(0))
        if total != 0:
            raise RowSumNonzero(f"momentum conservation needs every row of s to sum to 0; row {i + 1} sums to {total}")

    return KinematicPoint(n=n, s=s_exact, m2=m2_exact)


def from_momenta(d: int, p: Sequence[Sequence], m2: Sequence) -> KinematicPoint:
    """
    Invariants of explicit Euclidean momenta p_1..p_n in dimension d

    Raises:
        DimensionMismatch, MomentumNotConserved
    """
    vectors = [tuple(Fraction(x) for x in vec) for vec in p]
    if not vectors:
        raise DimensionMismatch("at least one momentum is required")
    bad = [i + 1 for i, vec in enumerate(vectors) if len(vec) != d]
    if bad:
        raise DimensionMismatch(f"momenta {bad} do not have length d={d}")
    total = tuple(sum(col, Fraction(0)) for col in zip(*vectors))
    if any(total):
        raise MomentumNotConserved(f"momenta must sum to zero, got {tuple(str(x) for x in total)}")
    s = [[sum((a * b for a, b in zip(u, v)), Fraction(0)) for v in vectors] for u in vectors]
    return from_invariants(len(vectors), s, m2)


def scale(K: KinematicPoint, lam) -> KinematicPoint:
    """Projective rescaling (lambda*s, lambda*m2)"""
    lam = Fraction(lam)
    return KinematicPoint(
        n=K.n,
        s=tuple(tuple(lam * x for x in row) for row in K.s),
        m2=tuple(lam * x for x in K.m2),
    )


def _check_edge(K: KinematicPoint, i) -> None:
    if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= K.n:
        raise IndexOutOfRange(f"edge index {i!r} outside 1..{K.n}")


def _range_sum(K: KinematicPoint, indices: Sequence[int]) -> Fraction:
    return sum((K.s[k - 1][l - 1] for k in indices for l in indices), Fraction(0))


def range_momentum_sq(K: KinematicPoint, a: int, b: int) -> Fraction:
    """p_{a,b}^2 = (p_a + ... + p_b)^2 for 1 <= a <= b <= n"""
    _check_edge(K, a)
    _check_edge(K, b)
    if a > b:
        raise IndexOutOfRange(f"range needs a <= b, got a={a}, b={b}")
    return _range_sum(K, range(a, b + 1))


def _pair_product(K: KinematicPoint, i: Index, j: Index) -> Fraction:
    if i == INFINITY and j == INFINITY:
        return Fraction(0)
    if i == INFINITY or j == INFINITY:
        return Fraction(-1)
    if i == j:
        return -2 * K.m2[i - 1]
    lo, hi = min(i, j), max(i, j)
    inner = _range_sum(K, range(lo + 1, hi + 1))
    return -(K.m2[lo - 1] + K.m2[hi - 1] + inner)


def _check_subset(K: KinematicPoint, I: Sequence[Index]) -> Tuple[Index, ...]:
    indices = tuple(I)
    for i in indices:
        if i != INFINITY:
            _check_edge(K, i)
    if len(set(indices)) != len(indices):
        raise IndexOutOfRange(f"Gram subset has repeated indices: {indices}")
    return indices


def gram_matrix(K: KinematicPoint, I: Sequence[Index]) -> GramData:
    """
    Gram matrix of the embedding vectors u_i (i in I, possibly INFINITY)

    <u_i,u_i> = -2 m_i^2, <u_i,u_j> = -(m_i^2 + m_j^2 + p_{i+1,j}^2) for i < j,
    <u_inf,u_i> = -1, <u_inf,u_inf> = 0.
    """
    indices = _check_subset(K, I)
    matrix = tuple(tuple(_pair_product(K, i, j) for j in indices) for i in indices)
    return GramData(subset=indices, matrix=matrix, det=exact_linalg.determinant(matrix))


def gram_det(K: KinematicPoint, I: Sequence[Index]) -> Fraction:
    return gram_matrix(K, I).det


def gram_subsets(n: int, max_size: int, with_infinity: bool = True) -> Iterable[Tuple[Index, ...]]:
    """Subsets of {1..n} (plus INFINITY) with 1 <= |I| <= max_size, excluding {INFINITY}"""
    pool: List[Index] = list(range(1, n + 1))
    if with_infinity:
        pool.append(INFINITY)
    for size in range(1, min(max_size, len(pool)) + 1):
        for I in itertools.combinations(pool, size):
            if I == (INFINITY,):
                continue
            yield I


def gram_determinants(K: KinematicPoint, max_size: int) -> Dict[Tuple[Index, ...], Fraction]:
    """All G_I for I in gram_subsets(K.n, max_size)"""
    EngineConfig.check_edge_envelope(K.n, "gram_determinants")
    return {I: gram_det(K, I) for I in gram_subsets(K.n, max_size)}


def is_generic(K: KinematicPoint, d: int) -> GenericityReport:
    """
    Genericity in dimension d: G_I != 0 for every I with |I| <= d+1, I != {inf},
    and rank(s) <= d
    """
    _check_even_dimension(d)
    dets = gram_determinants(K, d + 1)
    failures = [(I, value) for I, value in dets.items() if value == 0]
    s_rank = exact_linalg.rank(K.s)
    rank_ok = s_rank <= d
    report = GenericityReport(
        is_generic=not failures and rank_ok,
        d=d,
        failures=failures,
        rank_ok=rank_ok,
        s_rank=s_rank,
    )
    logger.debug(f"genericity n={K.n} d={d}: {len(dets)} subsets, {len(failures)} failures, rank(s)={s_rank}")
    return report


def is_euclidean(K: KinematicPoint, d: int) -> EuclideanReport:
    """s positive semidefinite of rank <= d, all m_i^2 > 0, and generic"""
    _check_even_dimension(d)
    factor = exact_linalg.ldl_decompose(K.s)
    masses_positive = all(m > 0 for m in K.m2)
    genericity = is_generic(K, d)
    verdict = factor.is_psd and factor.rank <= d and masses_positive and genericity.is_generic
    return EuclideanReport(
        is_euclidean=verdict,
        d=d,
        psd=factor.is_psd,
        s_rank=factor.rank,
        masses_positive=masses_positive,
        genericity=genericity,
    )


def signature(M: Sequence[Sequence]) -> Tuple[int, int, int]:
    """Exact (pos, neg, zero) inertia of a rational symmetric matrix"""
    if not exact_linalg.is_symmetric(M):
        raise NotSymmetric("signature needs a symmetric square matrix")
    return exact_linalg.signature(M)


def realize_momenta(K: KinematicPoint, d: int, tol: Optional[float] = None) -> RealizedMomenta:
    """
    Concrete momenta p_i in R^d with p_i.p_j = s_ij

    Built from the exact pivoted LDL^T of s; only the pivot square roots are
    taken in floating point.
    """
    tol = EngineConfig.REALIZE_TOL if tol is None else tol
    report = is_euclidean(K, d)
    if not report:
        raise NotEuclidean(
            f"kinematics are not Euclidean in d={d} (psd={report.psd}, rank(s)={report.s_rank}, "
            f"masses_positive={report.masses_positive}, generic={report.genericity.is_generic})"
        )

    factor = exact_linalg.ldl_decompose(K.s)
    vectors = np.zeros((K.n, d))
    for a, (_, pivot, column) in enumerate(factor.columns):
        root = math.sqrt(pivot)
        for i in range(K.n):
            vectors[i, a] = float(column[i]) * root

    target = np.array([[float(x) for x in row] for row in K.s])
    residual = float(np.max(np.abs(vectors @ vectors.T - target)))
    residual = max(residual, float(np.max(np.abs(vectors.sum(axis=0)))))
    if residual > tol:
        raise ToleranceUnachievable(f"realized momenta residual {residual:.3e} exceeds tol {tol:.3e}")
    return RealizedMomenta(d=d, vectors=vectors, residual=residual)


def merged_ranges(n: int, pinched: Iterable[int]) -> List[Tuple[int, List[int]]]:
    """
    Surviving edges j_1 < ... < j_k and the cyclic index ranges
    j_{a-1}+1 .. j_a (j_0 = j_k) whose momenta merge into leg a
    """
    pinched = set(pinched)
    bad = sorted(e for e in pinched if not 1 <= e <= n)
    if bad:
        raise IndexOutOfRange(f"pinched edges {bad} outside 1..{n}")
    survivors = [j for j in range(1, n + 1) if j not in pinched]
    if not survivors:
        raise AllEdgesPinched(f"cannot pinch all {n} edges: at least one edge must survive")
    ranges = []
    prev = survivors[-1]
    for j in survivors:
        start = prev % n + 1
        indices = []
        x = start
        while True:
            indices.append(x)
            if x == j:
                break
            x = x % n + 1
        ranges.append((j, indices))
        prev = j
    return ranges


def merge_kinematics(K: KinematicPoint, pinched: Iterable[int]) -> KinematicPoint:
    """Kinematics of the quotient graph obtained by summing adjacent external momenta"""
    ranges = merged_ranges(K.n, pinched)
    k = len(ranges)
    s = [[sum((K.s[x - 1][y - 1] for x in ra for y in rb), Fraction(0)) for _, rb in ranges] for _, ra in ranges]
    m2 = [K.m2[j - 1] for j, _ in ranges]
    return from_invariants(k, s, m2)


def embedding_vectors(momenta: Sequence[Sequence], m2: Sequence) -> Dict[Index, Tuple[Tuple[Fraction, ...], Fraction, Fraction]]:
    """
    Explicit vectors (K, K+, K-) of the compactified momentum space:
    u_i = (P_{1,i}, -(P_{1,i}^2 + m_i^2), -1) and u_inf = (0, -1, 0)
    """
    vectors = [tuple(Fraction(x) for x in vec) for vec in momenta]
    dim = len(vectors[0]) if vectors else 0
    partial = [Fraction(0)] * dim
    out: Dict[Index, Tuple[Tuple[Fraction, ...], Fraction, Fraction]] = {}
    for i, (vec, mass_sq) in enumerate(zip(vectors, m2), start=1):
        partial = [a + b for a, b in zip(partial, vec)]
        norm = sum((x * x for x in partial), Fraction(0))
        out[i] = (tuple(partial), -(norm + Fraction(mass_sq)), Fraction(-1))
    out[INFINITY] = (tuple(Fraction(0) for _ in range(dim)), Fraction(-1), Fraction(0))
    return out


def embedding_product(u, v) -> Fraction:
    """<(K,K+,K-),(K',K'+,K'-)> = 2 K.K' - (K+ K'- + K- K'+)"""
    (k, kp, km), (l, lp, lm) = u, v
    dot = sum((a * b for a, b in zip(k, l)), Fraction(0))
    return 2 * dot - (kp * lm + km * lp)


def embedding_form_matrix(d: int) -> List[List[Fraction]]:
    """Matrix of the coordinate form on R^d + hyperbolic plane"""
    size = d + 2
    M = [[Fraction(0)] * size for _ in range(size)]
    for a in range(d):
        M[a][a] = Fraction(2)
    M[d][d + 1] = M[d + 1][d] = Fraction(-1)
    return M


def extended_form_signature(d: int) -> Tuple[int, int, int]:
    return signature(embedding_form_matrix(d))


def stable_dimension(n: int) -> int:
    """Smallest even d >= n"""
    return n if n % 2 == 0 else n + 1
