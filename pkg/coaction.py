"""
Coaction
Symbolic de Rham motivic coaction and coproduct of n-gon periods.

Expressions are formal rational combinations of tensors of period symbols:
motivic periods Im(Q) of uncut quotients Q of the n-gon, and de Rham periods
Idr(P, gamma) of a parent quotient P cut along gamma. Quotients are kept as
pinched subsets of the n-gon so the pullback of kinematics stays unambiguous.

Normal form relations, applied to every tensor slot:
    Im(point) = Idr(point, {}) = 1
    Idr(P, gamma) = 0 when P has an even number of edges and |gamma| is odd
    sum_i Idr(P, {e_i}) = 0, used to eliminate the highest edge of P
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from engine_config import EngineConfig
from errors import EngineError
from graphs import CutQuotientGraph, n_gon, quotient_keeping

logger = logging.getLogger(__name__)


class CoactionError(EngineError):
    """Invalid coaction or coproduct request"""
    pass


class TooSmall(CoactionError):
    pass


class BadSubset(CoactionError):
    pass


UNIT_KIND = 'unit'
MOTIVIC_KIND = 'Im'
DE_RHAM_KIND = 'Idr'
_KIND_RANK = {UNIT_KIND: 0, MOTIVIC_KIND: 1, DE_RHAM_KIND: 2}


@dataclass(frozen=True)
class PeriodSymbol:
    """A unit, a motivic period Im(graph), or a de Rham period Idr(graph, gamma)"""
    kind: str
    graph: Optional[CutQuotientGraph] = None
    gamma: Tuple[int, ...] = ()

    def sort_key(self):
        if self.kind == UNIT_KIND:
            return (0, 0, (), 0, ())
        return (
            _KIND_RANK[self.kind],
            len(self.gamma) if self.kind == DE_RHAM_KIND else len(self.graph.edges),
            self.gamma if self.kind == DE_RHAM_KIND else self.graph.edges,
            self.graph.n,
            self.graph.sorted_pinched(),
        )

    def __str__(self) -> str:
        if self.kind == UNIT_KIND:
            return "1"
        if self.kind == MOTIVIC_KIND:
            return f"I^m({self.graph})"
        return "I^dr({}, {{{}}})".format(self.graph, ",".join(str(e) for e in self.gamma))


UNIT = PeriodSymbol(UNIT_KIND)


def motivic(graph: CutQuotientGraph) -> PeriodSymbol:
    if graph.cuts:
        raise BadSubset(f"motivic periods are attached to uncut graphs, got {graph}")
    if graph.is_point:
        return UNIT
    return PeriodSymbol(MOTIVIC_KIND, graph=graph)


def de_rham(parent: CutQuotientGraph, gamma: Iterable[int]) -> PeriodSymbol:
    gamma = tuple(sorted(set(gamma)))
    if parent.cuts:
        raise BadSubset(f"de Rham periods take an uncut parent, got {parent}")
    missing = [e for e in gamma if e not in parent.edges]
    if missing:
        raise BadSubset(f"cut edges {missing} are not edges of {parent}")
    if parent.is_point:
        return UNIT
    return PeriodSymbol(DE_RHAM_KIND, graph=parent, gamma=gamma)


Term = Tuple[PeriodSymbol, ...]


class CoactionExpression:
    """
    Rational combination of tensors of period symbols.
    data maps (factor, factor, ...) -> coefficient; every key has `arity` factors.
    """

    def __init__(self, data: Optional[Dict[Term, Fraction]] = None, arity: int = 2):
        self.arity = arity
        self.data: Dict[Term, Fraction] = {}
        for key, coeff in (data or {}).items():
            self.add(coeff, *key)

    def add(self, coeff, *factors: PeriodSymbol) -> None:
        if len(factors) != self.arity:
            raise ValueError(f"expected {self.arity} tensor factors, got {len(factors)}")
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        value = self.data.get(factors, Fraction(0)) + coeff
        if value == 0:
            self.data.pop(factors, None)
        else:
            self.data[factors] = value

    def items(self) -> List[Tuple[Term, Fraction]]:
        """Terms in canonical order: last factor first, then earlier ones"""
        return sorted(self.data.items(), key=lambda kv: tuple(f.sort_key() for f in reversed(kv[0])))

    def terms(self) -> List[Tuple[Fraction, PeriodSymbol, PeriodSymbol]]:
        """(coeff, left, right) triples of a two-slot expression"""
        if self.arity != 2:
            raise ValueError(f"terms() needs a two-slot expression, this one has {self.arity}")
        return [(coeff, key[0], key[1]) for key, coeff in self.items()]

    def is_zero(self) -> bool:
        return not self.data

    def __len__(self) -> int:
        return len(self.data)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoactionExpression) and self.arity == other.arity and self.data == other.data

    def __add__(self, other: 'CoactionExpression') -> 'CoactionExpression':
        if self.arity != other.arity:
            raise ValueError(f"cannot add tensors of arity {self.arity} and {other.arity}")
        out = CoactionExpression(self.data, self.arity)
        for key, coeff in other.data.items():
            out.add(coeff, *key)
        return out

    def __mul__(self, scale) -> 'CoactionExpression':
        scale = Fraction(scale)
        return CoactionExpression({k: scale * v for k, v in self.data.items()}, self.arity)

    __rmul__ = __mul__

    def __neg__(self) -> 'CoactionExpression':
        return -1 * self

    def __sub__(self, other: 'CoactionExpression') -> 'CoactionExpression':
        return self + (-other)

    def __repr__(self) -> str:
        return f"CoactionExpression({render_text(self)})"


def _normalize_symbol(sym: PeriodSymbol) -> Dict[PeriodSymbol, Fraction]:
    if sym.kind == UNIT_KIND:
        return {UNIT: Fraction(1)}
    parent = sym.graph
    if sym.kind == MOTIVIC_KIND:
        return {UNIT: Fraction(1)} if parent.is_point else {sym: Fraction(1)}

    edges = parent.edges
    if not edges and not sym.gamma:
        return {UNIT: Fraction(1)}
    if len(edges) % 2 == 0 and len(sym.gamma) % 2 == 1:
        return {}
    if len(sym.gamma) == 1 and sym.gamma[0] == edges[-1]:
        return {PeriodSymbol(DE_RHAM_KIND, graph=parent, gamma=(e,)): Fraction(-1) for e in edges[:-1]}
    return {sym: Fraction(1)}


def normal_form(expr: CoactionExpression) -> CoactionExpression:
    """Apply the unit, parity and zero-sum relations slot by slot and merge like terms"""
    out = CoactionExpression(arity=expr.arity)
    for key, coeff in expr.data.items():
        expansions = [_normalize_symbol(sym).items() for sym in key]
        for combo in itertools.product(*expansions):
            factor = coeff
            for _, c in combo:
                factor *= c
            out.add(factor, *(sym for sym, _ in combo))
    return out


def _check_subset(n: int, gamma: Iterable[int]) -> Tuple[int, ...]:
    gamma = tuple(gamma)
    if len(set(gamma)) != len(gamma) or any(isinstance(e, bool) or not isinstance(e, int) or not 1 <= e <= n for e in gamma):
        raise BadSubset(f"{list(gamma)} is not a subset of the edges 1..{n}")
    return tuple(sorted(gamma))


def coaction(n: int, j: int = 1, normalize: bool = True) -> CoactionExpression:
    """
    rho(Im(Gamma_n)) = sum over gamma of Im(Gamma_n / gamma^c) (x) Idr(Gamma_n, gamma)

    Odd |gamma| terms are omitted for even n. For odd n the single-edge terms
    are grouped as sum_i (Im(t_i) - Im(t_j)) (x) Idr(Gamma_n, e_i), where t_i
    keeps only edge i.
    """
    if n < 2:
        raise TooSmall(f"the coaction needs n >= 2 (the tadpole has no canonical motivic period), got n={n}")
    if not 1 <= j <= n:
        raise BadSubset(f"reference edge j={j} outside 1..{n}")
    EngineConfig.check_edge_envelope(n, "coaction")

    parent = n_gon(n)
    expr = CoactionExpression()
    for size in range(n + 1):
        if n % 2 == 0 and size % 2 == 1:
            continue
        for gamma in itertools.combinations(range(1, n + 1), size):
            if n % 2 == 1 and size == 1:
                i = gamma[0]
                expr.add(1, motivic(quotient_keeping(n, (i,))), de_rham(parent, gamma))
                expr.add(-1, motivic(quotient_keeping(n, (j,))), de_rham(parent, gamma))
                continue
            expr.add(1, motivic(quotient_keeping(n, gamma)), de_rham(parent, gamma))
    logger.debug(f"coaction n={n} j={j}: {len(expr)} raw terms")
    return normal_form(expr) if normalize else expr


def coproduct(n: int, gamma: Iterable[int], normalize: bool = True) -> CoactionExpression:
    """Delta(Idr(Gamma_n, gamma)) = sum over gamma' >= gamma of Idr(Gamma_n / gamma'^c, gamma) (x) Idr(Gamma_n, gamma')"""
    if n < 1:
        raise TooSmall(f"n must be >= 1, got {n}")
    EngineConfig.check_edge_envelope(n, "coproduct")
    gamma = _check_subset(n, gamma)
    expr = coproduct_of_symbol(de_rham(n_gon(n), gamma))
    return normal_form(expr) if normalize else expr


def coaction_of_symbol(sym: PeriodSymbol) -> CoactionExpression:
    """rho on a single motivic period (the unit maps to 1 (x) 1)"""
    expr = CoactionExpression()
    if sym.kind == UNIT_KIND:
        expr.add(1, UNIT, UNIT)
        return expr
    if sym.kind != MOTIVIC_KIND:
        raise ValueError(f"rho acts on motivic periods, got {sym}")
    Q = sym.graph
    for size in range(len(Q.edges) + 1):
        for delta in itertools.combinations(Q.edges, size):
            expr.add(1, motivic(quotient_keeping(Q.n, delta)), de_rham(Q, delta))
    return expr


def coproduct_of_symbol(sym: PeriodSymbol) -> CoactionExpression:
    """Delta on a single de Rham period (the unit maps to 1 (x) 1)"""
    expr = CoactionExpression()
    if sym.kind == UNIT_KIND:
        expr.add(1, UNIT, UNIT)
        return expr
    if sym.kind != DE_RHAM_KIND:
        raise ValueError(f"Delta acts on de Rham periods, got {sym}")
    P = sym.graph
    rest = [e for e in P.edges if e not in sym.gamma]
    for size in range(len(rest) + 1):
        for extra in itertools.combinations(rest, size):
            bigger = tuple(sorted(sym.gamma + extra))
            expr.add(1, de_rham(quotient_keeping(P.n, bigger), sym.gamma), de_rham(P, bigger))
    return expr


def apply_to_slot(expr: CoactionExpression, slot: int,
                  fn: Callable[[PeriodSymbol], CoactionExpression]) -> CoactionExpression:
    """Replace the factor in `slot` by the two-slot expression fn(factor)"""
    out = CoactionExpression(arity=expr.arity + 1)
    for key, coeff in expr.data.items():
        image = fn(key[slot])
        for inner, c in image.data.items():
            out.add(coeff * c, *(key[:slot] + inner + key[slot + 1:]))
    return out


@dataclass
class CoassociativityReport:
    ok: bool
    n: int
    terms_checked: int
    counterexample: Optional[Tuple[Term, Fraction, Fraction]] = None

    def __bool__(self) -> bool:
        return self.ok


def check_coassociativity(n: int, j: int = 1) -> CoassociativityReport:
    """Compare (id (x) Delta) rho with (rho (x) id) rho on Im(Gamma_n) in normal form"""
    if not 2 <= n <= 8:
        raise TooSmall(f"coassociativity is checked for 2 <= n <= 8, got n={n}")
    rho = coaction(n, j=j)
    lhs = normal_form(apply_to_slot(rho, 1, coproduct_of_symbol))
    rhs = normal_form(apply_to_slot(rho, 0, coaction_of_symbol))
    keys = set(lhs.data) | set(rhs.data)
    for key in sorted(keys, key=lambda k: tuple(f.sort_key() for f in reversed(k))):
        a = lhs.data.get(key, Fraction(0))
        b = rhs.data.get(key, Fraction(0))
        if a != b:
            logger.warning(f"coassociativity fails for n={n} at {' (x) '.join(str(s) for s in key)}: {a} != {b}")
            return CoassociativityReport(ok=False, n=n, terms_checked=len(keys), counterexample=(key, a, b))
    logger.debug(f"coassociativity n={n}: {len(keys)} triple terms agree")
    return CoassociativityReport(ok=True, n=n, terms_checked=len(keys))


def _format_coeff(coeff: Fraction, first: bool) -> str:
    sign = '-' if coeff < 0 else '+'
    magnitude = abs(coeff)
    body = '' if magnitude == 1 else f"{magnitude}·"
    if first:
        return ('-' if coeff < 0 else '') + body
    return f" {sign} {body}"


def render_text(expr: CoactionExpression) -> str:
    """Plain-text rendering: I^m(...) (x) I^dr(..., {gamma}) terms"""
    if expr.is_zero():
        return "0"
    parts = []
    for idx, (key, coeff) in enumerate(expr.items()):
        parts.append(_format_coeff(coeff, idx == 0) + " ⊗ ".join(str(sym) for sym in key))
    return "".join(parts)
