"""
Cut quotient graphs of the n-gon.

A graph is always stored relative to its parent n-gon: which edges have been
pinched (contracted) and which have been cut (residues taken). Orientation is
not tracked.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple

from errors import EngineError

logger = logging.getLogger(__name__)


class GraphError(EngineError):
    """Invalid graph construction or edge operation"""
    pass


class NonPositive(GraphError):
    pass


class EdgeNotPresent(GraphError):
    pass


class EdgeIsCut(GraphError):
    pass


class AlreadyCut(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class PointGraph(GraphError):
    pass


@dataclass(frozen=True)
class CutQuotientGraph:
    """Quotient of the n-gon by a pinched edge set, with a disjoint set of cut edges"""
    n: int
    pinched: FrozenSet[int] = frozenset()
    cuts: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise NonPositive(f"n-gon size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, 'pinched', frozenset(self.pinched))
        object.__setattr__(self, 'cuts', frozenset(self.cuts))
        outside = sorted(e for e in self.pinched | self.cuts if not 1 <= e <= self.n)
        if outside:
            raise EdgeNotPresent(f"edges {outside} are not edges of the {self.n}-gon")
        both = sorted(self.pinched & self.cuts)
        if both:
            raise EdgeIsCut(f"edges {both} are both pinched and cut")

    @property
    def edges(self) -> Tuple[int, ...]:
        """Surviving edges, ascending"""
        return tuple(e for e in range(1, self.n + 1) if e not in self.pinched)

    @property
    def uncut_edges(self) -> Tuple[int, ...]:
        return tuple(e for e in self.edges if e not in self.cuts)

    @property
    def is_point(self) -> bool:
        return not self.edges

    def sorted_pinched(self) -> Tuple[int, ...]:
        return tuple(sorted(self.pinched))

    def sorted_cuts(self) -> Tuple[int, ...]:
        return tuple(sorted(self.cuts))

    def __str__(self) -> str:
        parts = [f"n={self.n}"]
        if self.pinched:
            parts.append("pinch=" + ",".join(str(e) for e in self.sorted_pinched()))
        if self.cuts:
            parts.append("cut=" + ",".join(str(e) for e in self.sorted_cuts()))
        return ";".join(parts)


def n_gon(n: int) -> CutQuotientGraph:
    """The one-loop graph with n edges, nothing pinched or cut"""
    return CutQuotientGraph(n=n)


def point_graph(n: int) -> CutQuotientGraph:
    """The fully contracted quotient of the n-gon"""
    return CutQuotientGraph(n=n, pinched=frozenset(range(1, n + 1)))


def quotient_keeping(n: int, gamma: Iterable[int]) -> CutQuotientGraph:
    """The quotient of the n-gon that keeps exactly the edges in gamma"""
    keep = frozenset(gamma)
    return CutQuotientGraph(n=n, pinched=frozenset(range(1, n + 1)) - keep)


def _check_uncut_edge(G: CutQuotientGraph, e: int) -> None:
    if e not in G.edges:
        raise EdgeNotPresent(f"edge {e!r} is not an edge of {G}")


def pinch(G: CutQuotientGraph, e: int) -> CutQuotientGraph:
    """Contract edge e"""
    _check_uncut_edge(G, e)
    if e in G.cuts:
        raise EdgeIsCut(f"edge {e} of {G} is cut and cannot be pinched")
    return CutQuotientGraph(n=G.n, pinched=G.pinched | {e}, cuts=G.cuts)


def cut(G: CutQuotientGraph, e: int) -> CutQuotientGraph:
    """Take the residue along edge e"""
    _check_uncut_edge(G, e)
    if e in G.cuts:
        raise AlreadyCut(f"edge {e} of {G} is already cut")
    return CutQuotientGraph(n=G.n, pinched=G.pinched, cuts=G.cuts | {e})


def residue_sign(order: Sequence[int]) -> int:
    """
    Sign picked up by iterated residues taken in the given order, relative to
    the ascending order; residues anticommute so this is the sign of the
    sorting permutation.
    """
    order = list(order)
    if len(set(order)) != len(order):
        raise DuplicateEdge(f"cut order {order} repeats an edge")
    inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
    return -1 if inversions % 2 else 1


def apply_cuts(G: CutQuotientGraph, order: Sequence[int]) -> Tuple[CutQuotientGraph, int]:
    """
    Cut the edges of `order` one after the other

    Returns:
        (cut graph, residue sign of the order)
    """
    sign = residue_sign(order)
    for e in order:
        G = cut(G, e)
    return G, sign


def reduce_to_k_gon(G: CutQuotientGraph) -> Tuple[int, Dict[int, int]]:
    """
    Identify a quotient with the k-gon on its surviving edges

    Returns:
        (k, map from parent edge to k-gon edge)
    """
    if G.is_point:
        raise PointGraph(f"{G} is the point graph and has no k-gon")
    edge_map = {e: a for a, e in enumerate(G.edges, start=1)}
    return len(edge_map), edge_map


def reduced_graph(G: CutQuotientGraph) -> CutQuotientGraph:
    """The k-gon of reduce_to_k_gon with the cuts carried along"""
    k, edge_map = reduce_to_k_gon(G)
    return CutQuotientGraph(n=k, cuts=frozenset(edge_map[e] for e in G.cuts))
