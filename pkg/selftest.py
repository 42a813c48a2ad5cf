#!/usr/bin/env python3
"""
N-gon Engine Self Test
Runs the oracle suites that validate the engine end to end

Each check returns True/False; the summary reports passed checks, timing and
memory use, and the process exits 0 only when every check passed.
"""

import itertools
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from math import comb
from typing import Callable, List, Optional, Tuple

import psutil

import coaction
import graphs
import integrator
import kinematics
import motive

logger = logging.getLogger(__name__)


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    detail: str = ''
    seconds: float = 0.0


@dataclass
class SelftestSummary:
    outcomes: List[CheckOutcome] = field(default_factory=list)
    elapsed: float = 0.0
    memory_mb: float = 0.0
    n_range: Tuple[int, int] = (2, 6)

    @property
    def passed(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    @property
    def total(self) -> int:
        return len(self.outcomes)

    @property
    def failed(self) -> List[str]:
        return [o.name for o in self.outcomes if not o.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {
            'ok': self.ok,
            'passed': self.passed,
            'total': self.total,
            'failed': self.failed,
            'n_range': list(self.n_range),
            'checks': [{'name': o.name, 'passed': o.passed, 'detail': o.detail} for o in self.outcomes],
        }


def random_rational(rng: random.Random, lo: int = -5, hi: int = 5, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))


def random_configuration(rng: random.Random, n: int, d: int) -> Tuple[List[List[Fraction]], List[Fraction]]:
    """Rational momenta p_1..p_n in Q^d summing to zero, and positive mass squares"""
    momenta = [[random_rational(rng) for _ in range(d)] for _ in range(n - 1)]
    momenta.append([-sum(col, Fraction(0)) for col in zip(*momenta)] if momenta else [Fraction(0)] * d)
    masses = [Fraction(rng.randint(1, 25), rng.randint(1, 4)) for _ in range(n)]
    return momenta, masses


def check_gram_oracle(samples: int = 25, seed: int = 7) -> Tuple[bool, str]:
    """Gram entries from invariants equal the coordinate form on explicit embedding vectors"""
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(1, 6)
        d = rng.choice([2, 4])
        momenta, masses = random_configuration(rng, n, d)
        K = kinematics.from_momenta(d, momenta, masses)
        vectors = kinematics.embedding_vectors(momenta, masses)
        indices = list(range(1, n + 1)) + [kinematics.INFINITY]
        gram = kinematics.gram_matrix(K, indices).matrix
        for a, i in enumerate(indices):
            for b, j in enumerate(indices):
                expected = kinematics.embedding_product(vectors[i], vectors[j])
                if gram[a][b] != expected:
                    return False, f"n={n} d={d} entry ({i},{j}): {gram[a][b]} != {expected}"
    return True, f"{samples} configurations"


def check_euclidean_sign_law(samples: int = 10, seed: int = 11) -> Tuple[bool, str]:
    """Euclidean points: every I within 1..n, |I| <= d, spans signature (|I|-1, 1) with G_I < 0"""
    rng = random.Random(seed)
    checked = 0
    for _ in range(20 * samples):
        if checked == samples:
            break
        n = rng.randint(2, 5)
        d = 2 if n <= 3 else 4
        momenta, masses = random_configuration(rng, n, d)
        K = kinematics.from_momenta(d, momenta, masses)
        if not kinematics.is_euclidean(K, d):
            continue
        for I in kinematics.gram_subsets(n, d, with_infinity=False):
            data = kinematics.gram_matrix(K, I)
            if kinematics.signature(data.matrix) != (len(I) - 1, 1, 0) or not data.det < 0:
                return False, f"I={I}: signature {kinematics.signature(data.matrix)}, G={data.det}"
        checked += 1
    if checked < samples:
        return False, f"only {checked} of {samples} sampled points were Euclidean"
    return True, f"{samples} Euclidean points"


def check_rank_identities(n_min: int, n_max: int) -> Tuple[bool, str]:
    for n in range(n_min, n_max + 1):
        G = graphs.n_gon(n)
        reduced = motive.weight_pieces(G, 'reduced').rank
        full = motive.weight_pieces(G, 'full').rank
        quotient = motive.weight_pieces(G, 'quotient').rank
        basis = len(motive.de_rham_basis(G, 'full'))
        if (reduced, full, reduced + quotient, basis) != (2 ** (n - 1), 2 ** n - 1, full, full):
            return False, f"n={n}: reduced={reduced} full={full} quotient={quotient} basis={basis}"
    return True, f"n={n_min}..{n_max}"


def check_weight_bounds(n_min: int, n_max: int) -> Tuple[bool, str]:
    for n in range(max(n_min, 2), n_max + 1):
        G = graphs.n_gon(n)
        full = motive.weight_bounds(G, 'full')
        reduced = motive.weight_bounds(G, 'reduced')
        if full[0] != 2 * ((n + 1) // 2) or reduced[0] != 2 * (n // 2):
            return False, f"n={n}: top weights full={full[0]} reduced={reduced[0]}"
        if full[1] != 1 or reduced[1] != 1:
            return False, f"n={n}: bottom ranks full={full[1]} reduced={reduced[1]}"
        if (n % 2 == 1 and full[2] != 1) or (n % 2 == 0 and reduced[2] != 1):
            return False, f"n={n}: top ranks full={full[2]} reduced={reduced[2]}"
    return True, f"n={n_min}..{n_max}"


def check_spectral_sequence(n_min: int, n_max: int) -> Tuple[bool, str]:
    for n in range(1, min(n_max, 7) + 1):
        for d in (2, 4, 6, 8):
            ranks = motive.plus_part_cohomology_ranks(n, d)
            expected = [comb(n - 1, k) for k in range(d + 1)]
            if ranks != expected:
                return False, f"plus part n={n} d={d}: {ranks} != {expected}"
    for n in range(n_min, n_max + 1):
        G = graphs.n_gon(n)
        for variant in ('reduced', 'quotient'):
            if motive.minus_part_gr_ranks(n, variant) != motive.weight_pieces(G, variant).weight_ranks():
                return False, f"minus part n={n} {variant}"
    return True, f"n<={min(n_max, 7)}, d<=8"


def check_residue_anticommutation(residue_sign_fn: Callable = graphs.residue_sign) -> Tuple[bool, str]:
    """Residue signs: ascending order is +1, one swap flips, and signs multiply under composition"""
    if residue_sign_fn([1, 3, 4]) != 1 or residue_sign_fn([3, 1]) != -1 or residue_sign_fn([2, 1, 3]) != -1:
        return False, "sign of basic orders"
    edges = [1, 2, 3, 4]
    for perm in itertools.permutations(edges):
        for swap in range(len(edges) - 1):
            swapped = list(perm)
            swapped[swap], swapped[swap + 1] = swapped[swap + 1], swapped[swap]
            if residue_sign_fn(swapped) != -residue_sign_fn(list(perm)):
                return False, f"adjacent swap of {perm} does not flip the sign"
    return True, "permutations of 4 edges"


def check_coaction_structure(n_min: int, n_max: int) -> Tuple[bool, str]:
    for n in range(max(n_min, 2), n_max + 1):
        expr = coaction.coaction(n)
        if n % 2 == 0:
            if len(expr) != 2 ** (n - 1):
                return False, f"n={n}: {len(expr)} terms"
            if any(len(right.gamma) % 2 for _, _, right in expr.terms()):
                return False, f"n={n}: odd cut in a right factor"
        else:
            reference = coaction.coaction(n, j=1)
            if any(coaction.coaction(n, j=j) != reference for j in range(2, n + 1)):
                return False, f"n={n}: single-edge block depends on j"
    return True, f"n={max(n_min, 2)}..{n_max}"


def check_coassociativity(n_min: int, n_max: int) -> Tuple[bool, str]:
    for n in range(max(n_min, 2), min(n_max, 8) + 1):
        report = coaction.check_coassociativity(n)
        if not report:
            return False, f"n={n}: {report.counterexample}"
    return True, f"n={max(n_min, 2)}..{min(n_max, 8)}"


def check_max_cut_characters(samples: int = 10, seed: int = 13) -> Tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, 6)
        momenta, masses = random_configuration(rng, n, 4)
        K = kinematics.from_momenta(4, momenta, masses)
        for size in range(2, n + 1, 2):
            for I in itertools.combinations(range(1, n + 1), size):
                if kinematics.gram_det(K, I) == 0:
                    continue
                if motive.square_class(K, I) != motive.max_cut_character(K, I):
                    return False, f"I={I}"
    return True, f"{samples} points"


def check_integrator_identities() -> Tuple[bool, str]:
    for m2 in (Fraction(1), Fraction(4)):
        K = kinematics.from_invariants(1, [[0]], [m2])
        spec = integrator.IntegralSpec(graph=graphs.n_gon(1), d=2, nu=(2,), kinematics=K, tol=1e-8)
        value = integrator.integrate(spec).value
        expected = 1 / float(m2)
        if abs(value - expected) > 1e-6 * expected:
            return False, f"tadpole m2={m2}: {value} != {expected}"
    return True, "tadpole d=2"


def run_selftest(n_min: int = 2, n_max: int = 6, residue_sign_fn: Optional[Callable] = None,
                 include_integrator: bool = True) -> SelftestSummary:
    """
    Run all oracle suites

    Args:
        n_min, n_max: n-gon range for the combinatorial suites
        residue_sign_fn: replacement residue sign (mutation testing)
        include_integrator: run the numerical identity suite
    """
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"bad n-range {n_min}..{n_max}")
    residue_sign_fn = residue_sign_fn or graphs.residue_sign

    checks = [
        ("Gram coordinate oracle", check_gram_oracle),
        ("Euclidean sign law", check_euclidean_sign_law),
        ("Rank identities", lambda: check_rank_identities(n_min, n_max)),
        ("Weight bounds", lambda: check_weight_bounds(n_min, n_max)),
        ("Spectral sequence oracle", lambda: check_spectral_sequence(n_min, n_max)),
        ("Residue anticommutation", lambda: check_residue_anticommutation(residue_sign_fn)),
        ("Coaction structure", lambda: check_coaction_structure(n_min, n_max)),
        ("Coassociativity", lambda: check_coassociativity(n_min, n_max)),
        ("Maximal-cut characters", check_max_cut_characters),
    ]
    if include_integrator:
        checks.append(("Integrator identities", check_integrator_identities))

    summary = SelftestSummary(n_range=(n_min, n_max))
    start = time.perf_counter()
    for check_name, check_function in checks:
        logger.info(f"🔄 Running {check_name} check...")
        t0 = time.perf_counter()
        try:
            passed, detail = check_function()
        except Exception as e:
            logger.error(f"💥 {check_name} check crashed: {e}")
            passed, detail = False, f"crashed: {e}"
        outcome = CheckOutcome(check_name, passed, detail, time.perf_counter() - t0)
        summary.outcomes.append(outcome)
        if passed:
            logger.info(f"✅ {check_name} check passed ({detail})")
        else:
            logger.error(f"❌ {check_name} check failed ({detail})")

    summary.elapsed = time.perf_counter() - start
    summary.memory_mb = psutil.Process().memory_info().rss / 2 ** 20

    logger.info("📊 Self Test Summary")
    logger.info(f"Checks passed: {summary.passed}/{summary.total}")
    logger.info(f"Execution time: {summary.elapsed:.2f} seconds")
    logger.info(f"Resident memory: {summary.memory_mb:.1f} MB")
    logger.info(f"Timestamp: {datetime.now(timezone.utc).isoformat()}")
    return summary


def main():
    from logging_setup import configure_logging

    configure_logging(level='INFO')
    summary = run_selftest()
    if summary.ok:
        logger.info("🎉 All self-test checks passed!")
        sys.exit(0)
    logger.error(f"💥 {summary.total - summary.passed} check(s) failed: {summary.failed}")
    sys.exit(1)


if __name__ == "__main__":
    main()
