#!/usr/bin/env python3
"""
N-gon Engine Command Line
Batch access to kinematics checks, motives, coaction formulas, integrals and
the self test. The JSON payload goes to stdout, diagnostics to stderr.

Exit codes: 0 success, 1 domain error, 2 usage error or malformed input.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import List, Optional

import coaction
import integrator
import kinematics
import motive
import serialization
import selftest
from engine_config import EngineConfig
from errors import EngineError
from logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass
class CommandOutcome:
    """Exit code plus the payload to print"""
    exit_code: int
    payload: dict
    text: Optional[str] = None


def _parse_csv_ints(raw: Optional[str], flag: str) -> List[int]:
    if raw is None or raw.strip() == '':
        return []
    try:
        return [int(x) for x in raw.split(',')]
    except ValueError:
        raise serialization.FormatError(f"{flag} must be a comma-separated list of integers, got {raw!r}")


def cmd_check(args) -> CommandOutcome:
    K = serialization.load_kinematics(args.kinematics)
    euclid = kinematics.is_euclidean(K, args.d)
    report = euclid.genericity
    dets = kinematics.gram_determinants(K, args.d + 1)
    payload = serialization.genericity_to_dict(report)
    payload.update({
        'euclidean': euclid.is_euclidean,
        'psd': euclid.psd,
        'masses_positive': euclid.masses_positive,
        'kinematics': serialization.kinematics_to_dict(K),
        'gram_determinants': {serialization.format_subset(I): serialization.format_rational(v) for I, v in dets.items()},
    })
    lines = [f"generic: {report.is_generic}", f"euclidean: {euclid.is_euclidean}", f"rank(s) = {report.s_rank}"]
    for I, value in report.failures:
        lines.append(f"vanishing G_{{{serialization.format_subset(I)}}}")
    if not report.is_generic:
        logger.error(f"kinematics are not generic in d={args.d}: {len(report.failures)} vanishing Gram determinants")
        return CommandOutcome(EXIT_DOMAIN, payload, "\n".join(lines))
    return CommandOutcome(EXIT_OK, payload, "\n".join(lines))


def _motive_text(M: motive.MotiveDescription) -> str:
    lines = [f"{M.variant} motive of {M.graph}: rank {M.rank}"]
    for p in M.pieces:
        chi = '' if p.character is None else f"  chi={p.character}"
        inf = ' + inf' if p.infinity else ''
        lines.append(f"  weight {p.weight}  Q({p.twist})  gamma={{{serialization.format_subset(p.gamma)}}}{inf}{chi}  x{p.multiplicity}")
    return "\n".join(lines)


def cmd_motive(args) -> CommandOutcome:
    G = serialization.parse_graph(args.graph)
    K = serialization.load_kinematics(args.kinematics) if args.kinematics else None
    description = motive.weight_pieces(G, args.variant, K if args.d is None else None)
    payload = serialization.motive_to_dict(description)
    text = [_motive_text(description)]
    if not G.is_point:
        top, bottom_rank, top_rank = motive.weight_bounds(G, args.variant)
        payload['weight_bounds'] = {'top_weight': top, 'bottom_rank': bottom_rank, 'top_rank': top_rank}
    basis = motive.de_rham_basis(G, args.variant, args.base_index)
    payload['de_rham_basis'] = [serialization.basis_element_to_dict(e) for e in basis]
    if args.d is not None:
        truncated = motive.weight_pieces(G, args.variant, K, d=args.d)
        payload['truncated'] = serialization.motive_to_dict(truncated)
        text.append(f"W_{args.d}:")
        text.append(_motive_text(truncated))
    return CommandOutcome(EXIT_OK, payload, "\n".join(text))


def cmd_coaction(args) -> CommandOutcome:
    if args.mode == 'coaction':
        raw = coaction.coaction(args.n, j=args.j, normalize=False)
    else:
        gamma = _parse_csv_ints(args.gamma, '--gamma')
        raw = coaction.coproduct(args.n, gamma, normalize=False)
    normalized = coaction.normal_form(raw)
    payload = serialization.expression_to_dict(normalized)
    payload.update({
        'mode': args.mode,
        'n': args.n,
        'raw': serialization.expression_to_dict(raw),
        'text': coaction.render_text(normalized),
    })
    if args.mode == 'coaction':
        payload['j'] = args.j
    else:
        payload['gamma'] = sorted(_parse_csv_ints(args.gamma, '--gamma'))
    return CommandOutcome(EXIT_OK, payload, coaction.render_text(normalized))


def cmd_integrate(args) -> CommandOutcome:
    G = serialization.parse_graph(args.graph)
    K = serialization.load_kinematics(args.kinematics)
    nu = tuple(_parse_csv_ints(args.nu, '--nu'))
    spec = integrator.IntegralSpec(graph=G, d=args.d, nu=nu, kinematics=K,
                                   method=EngineConfig.normalize_method(args.method),
                                   tol=args.tol, seed=args.seed)
    result = integrator.integrate(spec)
    payload = serialization.integral_result_to_dict(result, spec)
    payload['motive_variant'] = integrator.period_motive_variant(spec)
    text = f"I = {result.value:.12g} +- {result.error_estimate:.3g} ({result.method}, {result.n_evaluations} evaluations)"
    return CommandOutcome(EXIT_OK, payload, text)


def cmd_selftest(args) -> CommandOutcome:
    summary = selftest.run_selftest(n_min=args.n_min, n_max=args.n_max,
                                    include_integrator=not args.skip_integrator)
    text = "\n".join(f"{'PASS' if o.passed else 'FAIL'}  {o.name}  {o.detail}" for o in summary.outcomes)
    return CommandOutcome(EXIT_OK if summary.ok else EXIT_DOMAIN, summary.to_dict(), text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='ngon', description='One-loop n-gon kinematics, motives, coaction and integrals')
    parser.add_argument('--log-level', default=None, help='log level (default from NGON_LOG_LEVEL)')
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument('--json', dest='output', action='store_const', const='json', help='JSON payload (default)')
    fmt.add_argument('--text', dest='output', action='store_const', const='text', help='plain-text rendering')
    parser.set_defaults(output='json')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check', help='genericity and Euclidean checks of a kinematic point')
    p.add_argument('--kinematics', required=True)
    p.add_argument('--d', type=int, required=True)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser('motive', help='weight-graded motive of a cut quotient graph')
    p.add_argument('--graph', required=True, help='e.g. "n=4;pinch=2;cut=1,3"')
    p.add_argument('--variant', choices=motive.VARIANTS, default='reduced')
    p.add_argument('--kinematics')
    p.add_argument('--d', type=int)
    p.add_argument('--base-index', type=int, default=None)
    p.set_defaults(handler=cmd_motive)

    p = sub.add_parser('coaction', help='de Rham motivic coaction or coproduct')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--mode', choices=('coaction', 'coproduct'), default='coaction')
    p.add_argument('--gamma', default='')
    p.add_argument('--j', type=int, default=1)
    p.set_defaults(handler=cmd_coaction)

    p = sub.add_parser('integrate', help='numerical Euclidean integral')
    p.add_argument('--graph', required=True)
    p.add_argument('--d', type=int, required=True)
    p.add_argument('--nu', required=True, help='exponents of the surviving edges, comma separated')
    p.add_argument('--kinematics', required=True)
    p.add_argument('--method', default='quad', help='quad|mc')
    p.add_argument('--tol', type=float, default=None)
    p.add_argument('--seed', type=int, default=EngineConfig.DEFAULT_SEED)
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser('selftest', help='run the oracle suites')
    p.add_argument('--n-min', type=int, default=2)
    p.add_argument('--n-max', type=int, default=6)
    p.add_argument('--skip-integrator', action='store_true')
    p.set_defaults(handler=cmd_selftest)
    return parser


def _emit(outcome: CommandOutcome, output: str) -> None:
    if output == 'text' and outcome.text is not None:
        sys.stdout.write(outcome.text + "\n")
    else:
        sys.stdout.write(serialization.dumps(outcome.payload) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        configure_logging(level=args.log_level)
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE

    try:
        outcome = args.handler(args)
    except EngineError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stdout.write(serialization.dumps({'error': type(e).__name__, 'message': str(e)}) + "\n")
        return EXIT_DOMAIN
    except ValueError as e:
        logger.error(f"usage error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE

    _emit(outcome, args.output)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
