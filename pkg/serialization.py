"""
Serialization
JSON codecs for kinematics, graphs, motives, coaction formulas and integral
results. Exact numbers travel as rational strings "num/den" ("num" when the
denominator is 1); payloads are dumped with sorted keys so repeated runs are
byte-identical.
"""

import logging
import re
from fractions import Fraction
from typing import Any, Dict, Iterable, List

import ujson

from coaction import MOTIVIC_KIND, UNIT_KIND, CoactionExpression, PeriodSymbol
from graphs import CutQuotientGraph
from integrator import IntegralResult, IntegralSpec
from kinematics import INFINITY, GenericityReport, KinematicPoint, from_invariants
from motive import KERNEL_OF_SUM, DeRhamBasisElement, MotiveDescription, WeightPiece

logger = logging.getLogger(__name__)

_RATIONAL_RE = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$')


class FormatError(ValueError):
    """Malformed input document or notation"""
    pass


def dumps(obj: Any, indent: int = 0) -> str:
    return ujson.dumps(obj, sort_keys=True, ensure_ascii=False, indent=indent)


def loads(text: str) -> Any:
    try:
        return ujson.loads(text)
    except (ValueError, TypeError) as e:
        raise FormatError(f"malformed JSON: {e}")


def load_file(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}")
    return loads(text)


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(raw) -> Fraction:
    """Parse "a/b", "a" or a JSON integer; floats are rejected as inexact"""
    if isinstance(raw, bool):
        raise FormatError(f"expected a rational, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise FormatError(f"expected a rational string \"num/den\", got {raw!r}")
    match = _RATIONAL_RE.match(raw)
    if not match:
        raise FormatError(f"malformed rational {raw!r}")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise FormatError(f"zero denominator in {raw!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_index(index) -> str:
    return 'inf' if index == INFINITY else str(index)


def format_subset(indices: Iterable) -> str:
    return ",".join(format_index(i) for i in indices)


# -- kinematics ---------------------------------------------------------------

def kinematics_to_dict(K: KinematicPoint) -> Dict[str, Any]:
    return {
        'n': K.n,
        's': [[format_rational(x) for x in row] for row in K.s],
        'm2': [format_rational(x) for x in K.m2],
    }


def kinematics_from_dict(data: Any) -> KinematicPoint:
    """Decode {"n": int, "s": [[...]], "m2": [...]}; invariant violations surface as KinematicsError"""
    if not isinstance(data, dict):
        raise FormatError("kinematics document must be a JSON object")
    missing = [key for key in ('n', 's', 'm2') if key not in data]
    if missing:
        raise FormatError(f"kinematics document is missing {missing}")
    n, s, m2 = data['n'], data['s'], data['m2']
    if isinstance(n, bool) or not isinstance(n, int):
        raise FormatError(f"'n' must be an integer, got {n!r}")
    if not isinstance(s, list) or not all(isinstance(row, list) for row in s):
        raise FormatError("'s' must be a list of lists")
    if not isinstance(m2, list):
        raise FormatError("'m2' must be a list")
    return from_invariants(n, [[parse_rational(x) for x in row] for row in s], [parse_rational(x) for x in m2])


def load_kinematics(path: str) -> KinematicPoint:
    return kinematics_from_dict(load_file(path))


def genericity_to_dict(report: GenericityReport) -> Dict[str, Any]:
    return {
        'generic': report.is_generic,
        'd': report.d,
        'rank_ok': report.rank_ok,
        's_rank': report.s_rank,
        'failures': [{'subset': [format_index(i) for i in I], 'value': format_rational(v)} for I, v in report.failures],
    }


# -- graphs -------------------------------------------------------------------

def graph_to_dict(G: CutQuotientGraph) -> Dict[str, Any]:
    return {'n': G.n, 'pinch': list(G.sorted_pinched()), 'cut': list(G.sorted_cuts())}


def _parse_edge_list(raw: str, key: str) -> List[int]:
    if raw.strip() == '':
        return []
    try:
        return [int(part) for part in raw.split(',')]
    except ValueError:
        raise FormatError(f"'{key}' must be a comma-separated list of edges, got {raw!r}")


def parse_graph(text: str) -> CutQuotientGraph:
    """Parse "n=4;pinch=2;cut=1,3" (pinch and cut optional)"""
    fields: Dict[str, str] = {}
    for part in (text or '').split(';'):
        part = part.strip()
        if not part:
            continue
        if '=' not in part:
            raise FormatError(f"malformed graph notation {text!r}: expected key=value, got {part!r}")
        key, value = (x.strip() for x in part.split('=', 1))
        if key not in ('n', 'pinch', 'cut'):
            raise FormatError(f"unknown graph field {key!r} in {text!r}")
        if key in fields:
            raise FormatError(f"repeated graph field {key!r} in {text!r}")
        fields[key] = value
    if 'n' not in fields:
        raise FormatError(f"graph notation {text!r} has no 'n='")
    try:
        n = int(fields['n'])
    except ValueError:
        raise FormatError(f"'n' must be an integer in {text!r}")
    pinched = _parse_edge_list(fields.get('pinch', ''), 'pinch')
    cuts = _parse_edge_list(fields.get('cut', ''), 'cut')
    return CutQuotientGraph(n=n, pinched=frozenset(pinched), cuts=frozenset(cuts))


def graph_from_dict(data: Any) -> CutQuotientGraph:
    if not isinstance(data, dict) or 'n' not in data:
        raise FormatError("graph document must be an object with 'n'")
    return CutQuotientGraph(n=data['n'], pinched=frozenset(data.get('pinch', [])), cuts=frozenset(data.get('cut', [])))


# -- motives ------------------------------------------------------------------

def _character_to_json(piece: WeightPiece):
    if piece.character is None:
        return None
    if piece.character == KERNEL_OF_SUM:
        return KERNEL_OF_SUM
    return piece.character.representative


def piece_to_dict(piece: WeightPiece) -> Dict[str, Any]:
    return {
        'gamma': list(piece.gamma),
        'infty': piece.infinity,
        'weight': piece.weight,
        'twist': piece.twist,
        'character': _character_to_json(piece),
        'mult': piece.multiplicity,
    }


def motive_to_dict(M: MotiveDescription) -> Dict[str, Any]:
    out = {
        'graph': graph_to_dict(M.graph),
        'variant': M.variant,
        'pieces': [piece_to_dict(p) for p in M.pieces],
        'rank': M.rank,
    }
    if M.d is not None:
        out['d'] = M.d
    return out


def basis_element_to_dict(element: DeRhamBasisElement) -> Dict[str, Any]:
    if element.pair:
        return {'kind': 'omega_pair', 'pair': list(element.pair), 'form_dimension': element.form_dimension}
    return {'kind': 'omega', 'gamma': list(element.gamma), 'form_dimension': element.form_dimension}


# -- coaction -----------------------------------------------------------------

def symbol_to_dict(sym: PeriodSymbol) -> Dict[str, Any]:
    if sym.kind == UNIT_KIND:
        return {'type': 'unit'}
    if sym.kind == MOTIVIC_KIND:
        return {'type': 'Im', 'graph': graph_to_dict(sym.graph)}
    out = {'type': 'Idr', 'n': sym.graph.n, 'gamma': list(sym.gamma)}
    if sym.graph.pinched:
        out['pinch'] = list(sym.graph.sorted_pinched())
    return out


def expression_to_dict(expr: CoactionExpression) -> Dict[str, Any]:
    terms = []
    for key, coeff in expr.items():
        if expr.arity == 2:
            terms.append({'coeff': format_rational(coeff), 'left': symbol_to_dict(key[0]), 'right': symbol_to_dict(key[1])})
        else:
            terms.append({'coeff': format_rational(coeff), 'factors': [symbol_to_dict(s) for s in key]})
    return {'terms': terms}


# -- integrals ----------------------------------------------------------------

def spec_to_dict(spec: IntegralSpec) -> Dict[str, Any]:
    return {
        'graph': graph_to_dict(spec.graph),
        'd': spec.d,
        'nu': list(spec.nu),
        'kinematics': kinematics_to_dict(spec.kinematics),
        'method': spec.method,
        'tol': spec.effective_tol(),
        'seed': spec.seed,
    }


def integral_result_to_dict(result: IntegralResult, spec: IntegralSpec = None) -> Dict[str, Any]:
    out = {
        'value': result.value,
        'error': result.error_estimate,
        'n_evals': result.n_evaluations,
        'method': result.method,
        'converged': result.converged,
        'details': result.details,
    }
    if spec is not None:
        out['spec_echo'] = spec_to_dict(spec)
    return out
