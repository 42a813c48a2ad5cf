"""
Motive
Weight-graded description of the reduced, full and quotient motives of cut
quotient graphs of the n-gon.

Each graded piece is a Tate twist of a quadratic Artin motive. The character
is recorded as the square class of a signed Gram determinant; pieces of the
quotient motive in weight 2 form the kernel of the sum map and carry no
character.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

import exact_linalg
import kinematics
from engine_config import EngineConfig
from errors import EngineError
from graphs import CutQuotientGraph, PointGraph
from kinematics import INFINITY, KinematicPoint

logger = logging.getLogger(__name__)

VARIANTS = ('reduced', 'full', 'quotient')
KERNEL_OF_SUM = 'kernel'


class MotiveError(EngineError):
    """Motive computation failure"""
    pass


class NotGeneric(MotiveError):
    pass


class GramVanishes(MotiveError):
    pass


class OddSubset(MotiveError):
    pass


class BadBaseIndex(MotiveError):
    pass


@dataclass(frozen=True)
class SquareClass:
    """A nonzero rational modulo squares, as a signed squarefree integer"""
    representative: int

    @property
    def is_trivial(self) -> bool:
        return self.representative == 1

    def __str__(self) -> str:
        return str(self.representative)


TRIVIAL = SquareClass(1)

Character = Union[SquareClass, str, None]


@dataclass(frozen=True)
class WeightPiece:
    """
    One graded summand of a motive

    gamma is the edge part of the Gram subset (cut edges included), infinity
    says whether u_inf joins it. character is a SquareClass, KERNEL_OF_SUM, or
    None when no kinematics were supplied.
    """
    gamma: Tuple[int, ...]
    infinity: bool
    weight: int
    character: Character = None
    multiplicity: int = 1

    @property
    def twist(self) -> int:
        return -self.weight // 2

    @property
    def gram_subset(self) -> Tuple:
        return self.gamma + ((INFINITY,) if self.infinity else ())


@dataclass
class MotiveDescription:
    graph: CutQuotientGraph
    variant: str
    pieces: List[WeightPiece] = field(default_factory=list)
    d: Optional[int] = None

    @property
    def rank(self) -> int:
        return sum(piece.multiplicity for piece in self.pieces)

    def weight_ranks(self) -> Dict[int, int]:
        """weight -> total multiplicity"""
        ranks: Dict[int, int] = {}
        for piece in self.pieces:
            ranks[piece.weight] = ranks.get(piece.weight, 0) + piece.multiplicity
        return dict(sorted(ranks.items()))


@dataclass(frozen=True)
class DeRhamBasisElement:
    """omega(gamma), or omega_pair(i, j) when pair is set"""
    gamma: Tuple[int, ...] = ()
    pair: Optional[Tuple[int, int]] = None

    @property
    def kind(self) -> str:
        return 'omega_pair' if self.pair else 'omega'

    @property
    def form_dimension(self) -> int:
        """Dimension in which the class has a logarithmic representative"""
        if self.pair:
            return 2
        return 2 * ((len(self.gamma) + 1) // 2)

    def __str__(self) -> str:
        if self.pair:
            return f"omega_{{{self.pair[0]},{self.pair[1]}}}"
        return "omega(" + ",".join(str(e) for e in self.gamma) + ")"


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"unknown motive variant {variant!r}, expected one of {VARIANTS}")
    return variant


def squarefree_part(value: Fraction) -> int:
    """Signed squarefree kernel of num*den"""
    value = Fraction(value)
    if value == 0:
        raise GramVanishes("the square class of 0 is undefined")
    x = value.numerator * value.denominator
    part = 1
    for prime, exponent in sympy.factorint(abs(x)).items():
        if exponent % 2:
            part *= int(prime)
    return part if x > 0 else -part


def _signed_gram(K: KinematicPoint, I: Sequence) -> Fraction:
    if len(I) % 2:
        raise OddSubset(f"square classes need an even Gram subset, got {tuple(I)}")
    value = kinematics.gram_det(K, I)
    if value == 0:
        raise GramVanishes(f"Gram determinant vanishes on {tuple(I)}")
    return (-1) ** (len(I) // 2) * value


def square_class(K: KinematicPoint, I: Sequence) -> SquareClass:
    """Square class of (-1)^{|I|/2} G_I"""
    if not I:
        raise OddSubset("square classes need a nonempty even Gram subset")
    return SquareClass(squarefree_part(_signed_gram(K, I)))


def max_cut_character(K: KinematicPoint, I: Sequence) -> SquareClass:
    """
    Character of the maximal cut on I, read off the discriminant of
    t^2 + (-1)^{m+1} G_I with |I| = 2m
    """
    if not I or len(I) % 2:
        raise OddSubset(f"maximal-cut characters need a nonempty even subset, got {tuple(I)}")
    value = kinematics.gram_det(K, I)
    if value == 0:
        raise GramVanishes(f"Gram determinant vanishes on {tuple(I)}")
    m = len(I) // 2
    t = sympy.Symbol('t')
    constant = sympy.Rational(value.numerator, value.denominator) * (-1) ** (m + 1)
    disc = sympy.Rational(sympy.discriminant(t ** 2 + constant, t))
    return SquareClass(squarefree_part(Fraction(int(disc.p), int(disc.q))))


def _character(K: Optional[KinematicPoint], I: Tuple) -> Character:
    if K is None:
        return None
    if not I:
        return TRIVIAL
    return square_class(K, I)


def _reduced_pieces(G: CutQuotientGraph, K: Optional[KinematicPoint]) -> List[WeightPiece]:
    r = len(G.cuts)
    cuts = G.sorted_cuts()
    uncut = G.uncut_edges
    pieces = []
    for size in range(len(uncut) + 1):
        if (r + size) % 2:
            continue
        for gamma in itertools.combinations(uncut, size):
            full = tuple(sorted(cuts + gamma))
            pieces.append(WeightPiece(gamma=full, infinity=False, weight=r + size, character=_character(K, full)))
    return pieces


def _quotient_pieces(G: CutQuotientGraph, K: Optional[KinematicPoint]) -> List[WeightPiece]:
    r = len(G.cuts)
    cuts = G.sorted_cuts()
    uncut = G.uncut_edges
    pieces = []
    if r == 0 and len(uncut) > 1:
        pieces.append(WeightPiece(gamma=(), infinity=False, weight=2,
                                  character=KERNEL_OF_SUM, multiplicity=len(uncut) - 1))
    for size in range(len(uncut) + 1):
        if (r + size + 1) % 2:
            continue
        if r == 0 and size == 1:
            continue
        for gamma in itertools.combinations(uncut, size):
            full = tuple(sorted(cuts + gamma))
            pieces.append(WeightPiece(gamma=full, infinity=True, weight=r + size + 1,
                                      character=_character(K, full + (INFINITY,))))
    return pieces


def weight_pieces(G: CutQuotientGraph, variant: str, K: Optional[KinematicPoint] = None,
                  d: Optional[int] = None) -> MotiveDescription:
    """
    Graded pieces of the motive of G

    Args:
        G: cut quotient graph
        variant: 'reduced', 'full' or 'quotient'
        K: kinematics of the parent n-gon; characters are attached when given
        d: space-time dimension; when given the motive is the W_d part and
           genericity is checked in dimension d (default: smallest even d >= n)

    Raises:
        NotGeneric when K is given and fails genericity
    """
    _check_variant(variant)
    EngineConfig.check_edge_envelope(G.n, "weight_pieces")
    if K is not None:
        if K.n != G.n:
            raise kinematics.DimensionMismatch(f"kinematics have n={K.n} but graph {G} has n={G.n}")
        check_d = d if d is not None else kinematics.stable_dimension(G.n)
        report = kinematics.is_generic(K, check_d)
        if not report.is_generic:
            shown = [f"{{{','.join(str(i) for i in I)}}}" for I, _ in report.failures[:5]]
            raise NotGeneric(
                f"kinematics are not generic in d={check_d}: vanishing Gram subsets {shown}"
                f"{'' if report.rank_ok else f', rank(s)={report.s_rank} > d'}"
            )

    pieces: List[WeightPiece] = []
    if variant in ('reduced', 'full'):
        pieces.extend(_reduced_pieces(G, K if d is None else None))
    if variant in ('quotient', 'full'):
        pieces.extend(_quotient_pieces(G, K if d is None else None))
    pieces.sort(key=lambda p: (p.weight, len(p.gamma), p.gamma, p.infinity, p.character == KERNEL_OF_SUM))

    description = MotiveDescription(graph=G, variant=variant, pieces=pieces)
    if d is not None:
        description = truncate(description, d)
        if K is not None:
            description.pieces = [_attach_character(piece, K) for piece in description.pieces]
    logger.debug(f"motive {G} {variant}: {len(description.pieces)} pieces, rank {description.rank}")
    return description


def _attach_character(piece: WeightPiece, K: KinematicPoint) -> WeightPiece:
    if piece.character == KERNEL_OF_SUM:
        return piece
    return WeightPiece(gamma=piece.gamma, infinity=piece.infinity, weight=piece.weight,
                       character=_character(K, piece.gram_subset), multiplicity=piece.multiplicity)


def truncate(M: MotiveDescription, d: int) -> MotiveDescription:
    """W_d part: pieces of weight <= d"""
    if not isinstance(d, int) or d < 0 or d % 2:
        raise ValueError(f"truncation degree must be an even integer >= 0, got {d!r}")
    return MotiveDescription(
        graph=M.graph,
        variant=M.variant,
        pieces=[piece for piece in M.pieces if piece.weight <= d],
        d=d,
    )


def weight_bounds(G: CutQuotientGraph, variant: str) -> Tuple[int, int, int]:
    """(top weight, rank of the bottom weight, rank of the top weight)"""
    if G.is_point:
        raise PointGraph(f"{G} is the point graph")
    ranks = weight_pieces(G, variant).weight_ranks()
    if not ranks:
        return 0, 0, 0
    weights = list(ranks)
    return max(weights), ranks[min(weights)], ranks[max(weights)]


def de_rham_basis(G: CutQuotientGraph, variant: str, base_index: Optional[int] = None) -> List[DeRhamBasisElement]:
    """
    Basis of the de Rham realization

    For an uncut graph with k edges: reduced is omega(gamma) over even gamma;
    full is omega(gamma) over |gamma| != 1 together with omega_pair(i, j) for
    j != i; quotient is the complement of reduced in full. Cut graphs follow
    the parity of |cuts| + |gamma| like their weight pieces.
    """
    _check_variant(variant)
    EngineConfig.check_edge_envelope(G.n, "de_rham_basis")
    uncut = G.uncut_edges
    r = len(G.cuts)
    if base_index is not None and base_index not in uncut:
        raise BadBaseIndex(f"base index {base_index!r} is not an uncut edge of {G}")
    if base_index is None and uncut:
        base_index = uncut[0]

    cuts = G.sorted_cuts()
    basis: List[DeRhamBasisElement] = []
    for size in range(len(uncut) + 1):
        for gamma in itertools.combinations(uncut, size):
            full = tuple(sorted(cuts + gamma))
            in_reduced = (r + size) % 2 == 0
            in_quotient = not in_reduced and not (r == 0 and size == 1)
            if r == 0:
                in_full = size != 1
            else:
                in_full = True
            keep = {
                'reduced': in_reduced,
                'quotient': in_quotient,
                'full': in_full,
            }[variant]
            if keep:
                basis.append(DeRhamBasisElement(gamma=full))
    if r == 0 and variant in ('full', 'quotient'):
        basis.extend(DeRhamBasisElement(pair=(base_index, j)) for j in uncut if j != base_index)
    return basis


def omega_pair_in_basis(j: int, k: int, base_index: int) -> Dict[Tuple[int, int], int]:
    """omega_{j,k} = omega_{i,k} - omega_{i,j} with i the base index; omega_{i,i} = 0"""
    terms: Dict[Tuple[int, int], int] = {}
    if j == k:
        return terms
    if k != base_index:
        terms[(base_index, k)] = terms.get((base_index, k), 0) + 1
    if j != base_index:
        terms[(base_index, j)] = terms.get((base_index, j), 0) - 1
    return {key: value for key, value in terms.items() if value}


def dual_pairing(dual_gamma: Sequence[int], element: DeRhamBasisElement) -> int:
    """phi_gamma(omega): delta on subsets; phi_{e_i}(omega_{j,k}) = delta_ij - delta_ik"""
    dual = tuple(sorted(dual_gamma))
    if element.pair:
        if len(dual) != 1:
            return 0
        i = dual[0]
        j, k = element.pair
        return int(i == j) - int(i == k)
    return int(dual == tuple(sorted(element.gamma)))


@functools.lru_cache(maxsize=None)
def _boundary_rank(n: int, p: int) -> int:
    """Rank of the alternating-sum incidence map from p-subsets to (p-1)-subsets of n"""
    if p <= 0 or p > n:
        return 0
    rows_index = {S: a for a, S in enumerate(itertools.combinations(range(n), p - 1))}
    columns = list(itertools.combinations(range(n), p))
    matrix = [[0] * len(columns) for _ in rows_index]
    for c, S in enumerate(columns):
        for pos, _ in enumerate(S):
            face = S[:pos] + S[pos + 1:]
            matrix[rows_index[face]][c] = -1 if pos % 2 else 1
    return exact_linalg.rank(matrix)


def plus_part_cohomology_ranks(n: int, d: int) -> List[int]:
    """
    Cohomology ranks H^0..H^d from the weight rows of the first page

    Row j carries Q^{C(n,p)} in column p for p <= min(j, n), with the
    alternating incidence differential; homology in column p of row j lands
    in degree 2j - p.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    ranks = [0] * (d + 1)
    for j in range(d + 1):
        top = min(j, n)
        for p in range(top + 1):
            outgoing = _boundary_rank(n, p)
            incoming = _boundary_rank(n, p + 1) if p + 1 <= top else 0
            homology = comb(n, p) - outgoing - incoming
            degree = 2 * j - p
            if homology and 0 <= degree <= d:
                ranks[degree] += homology
    logger.debug(f"plus part n={n} d={d}: {ranks}")
    return ranks


def minus_part_gr_ranks(n: int, variant: str) -> Dict[int, int]:
    """Closed-form graded ranks: weight -> rank"""
    _check_variant(variant)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ranks: Dict[int, int] = {}
    if variant in ('reduced', 'full'):
        for m in range(n // 2 + 1):
            ranks[2 * m] = ranks.get(2 * m, 0) + comb(n, 2 * m)
    if variant in ('quotient', 'full'):
        ranks[2] = ranks.get(2, 0) + n - 1
        for m in range(2, (n + 1) // 2 + 1):
            ranks[2 * m] = ranks.get(2 * m, 0) + comb(n, 2 * m - 1)
    return {w: r for w, r in sorted(ranks.items()) if r}
