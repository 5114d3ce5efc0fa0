import argparse
import logging
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from openergodic.dynamics.systems import Observable
from openergodic.engine.core.report import InequalityReport, worst
from openergodic.engine.core.verify_engine import SUITES, VerifyEngine
from openergodic.engine.flux.averaging import AverageSpec, iter_system_rows
from openergodic.engine.flux.maximal import (bilinear_holder_check, hl_window_max, hopf_weak_type, poly_maximal_check,
                                             shift_maximal_check, system_maximal)
from openergodic.engine.flux.oscillation import oscillation_sum, oscillation_sum_system, parse_blocks
from openergodic.engine.flux.spectral import KernelTail, orbit_periodogram
from openergodic.engine.flux.transference import (measure_bilinear_constant, measure_weak_constant,
                                                  transfer_bilinear_check, transfer_weak_type_check,
                                                  truncated_orbit_pairs)
from openergodic.processing.arith import IntPolynomial, parse_polynomial, sieve
from openergodic.processing.signal_core import TorusGrid, random_signal
from openergodic.utils.config import RunConfig, load_config
from openergodic.utils.errors import ConfigError, DomainError, GoldenMissingError, PreconditionError, RangeError
from openergodic.utils.golden import GoldenStore
from openergodic.utils.loader import parse_system
from openergodic.utils.serialization import write_csv, write_json
from openergodic.validation.acceptance import build_registry

logging_levels = {0: logging.NOTSET, 1: logging.DEBUG, 2: logging.INFO, 3: logging.WARNING, 4: logging.ERROR,
                  5: logging.CRITICAL}

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


# ===================== HELPERS =====================

def _observables(system, loaded: Optional[Observable], rng: np.random.Generator, count: int) -> List[Observable]:
    """The loaded observable first (when any), then random ones."""
    observables = [loaded] if loaded is not None else []
    while len(observables) < count:
        observables.append(Observable.random(system.size, rng))
    return observables


def _average_spec(args, rho: float) -> AverageSpec:
    P = parse_polynomial(args.poly_p) if args.poly_p else IntPolynomial.identity()
    Q = parse_polynomial(args.poly_q) if args.poly_q else None
    modulation = None
    if args.theta is not None:
        R = parse_polynomial(args.poly_r) if args.poly_r else IntPolynomial.identity()
        modulation = (R, args.theta)
    return AverageSpec(kind='bilinear' if Q is not None else 'linear', index=args.index, P=P, Q=Q,
                       rho=(args.rho or rho) if args.index == 'lacunary' else None, modulation=modulation)


def _emit_reports(reports: List[InequalityReport], args) -> int:
    write_json([r.to_dict() for r in reports] if len(reports) != 1 else reports[0].to_dict(), args.output)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


# ===================== SUBCOMMANDS =====================

def run_avg(args, config: RunConfig) -> int:
    rng = np.random.default_rng(config.seed)
    system, loaded = parse_system(args.system, config.seed)
    spec = _average_spec(args, config.rho)
    f, g = _observables(system, loaded, rng, 2)
    system.check_point(args.x)
    table = sieve(max(args.n, 2)) if spec.index == 'primes' else None
    rows = [(N, args.x, row[args.x].real, row[args.x].imag)
            for N, row in iter_system_rows(system, f, spec, spec.admissible(args.n), g=g, table=table)]
    write_csv(pd.DataFrame(rows, columns=['N', 'x', 're', 'im']), args.output)
    return EXIT_OK


def run_maximal(args, config: RunConfig) -> int:
    rng = np.random.default_rng(config.seed)
    reports = []
    if args.check == 'hl':
        for _ in range(args.trials):
            J = int(rng.integers(1, 257))
            reports.append(hl_window_max(rng.exponential(size=J), args.r))
    elif args.check == 'shift':
        for _ in range(args.trials):
            reports.append(shift_maximal_check(random_signal(rng, args.support), args.r, args.n_max))
    elif args.check in ('poly', 'prime'):
        Q = parse_polynomial(args.poly_q) if args.poly_q else IntPolynomial.identity()
        table = sieve(max(args.n_max, 2)) if args.check == 'prime' else None
        for _ in range(args.trials):
            reports.append(poly_maximal_check(random_signal(rng, args.support), Q, args.r, args.n_max, table))
    elif args.check == 'bilinear':
        P = parse_polynomial(args.poly_p) if args.poly_p else IntPolynomial.identity()
        for _ in range(args.trials):
            f, g = random_signal(rng, args.support), random_signal(rng, args.support)
            reports.append(bilinear_holder_check(f, g, P, args.n_max, args.r))
    else:
        system, loaded = parse_system(args.system, config.seed)
        for f in _observables(system, loaded, rng, args.trials):
            horizon = 4 * system.size
            maximal, doubled = system_maximal(system, f, horizon), system_maximal(system, f, 2 * horizon)
            reports += [hopf_weak_type(system, f, lam, maximal, doubled, tol=config.tolerances.stabilization)
                        for lam in args.levels]
    summary = worst(f"{args.check}_maximal", reports, check=args.check)
    logging.info(f"maximal --check {args.check}: {summary.params['violations']} violations in {len(reports)} trials")
    return _emit_reports([summary], args)


def run_oscillation(args, config: RunConfig) -> int:
    rng = np.random.default_rng(config.seed)
    rho = args.rho or config.rho
    blocks = parse_blocks(args.blocks, args.K)
    spec = _average_spec(args, rho)
    table = sieve(max(int(blocks.cuts[-1]), 2)) if spec.index == 'primes' and blocks.K else None
    if args.system:
        system, loaded = parse_system(args.system, config.seed)
        f, g = _observables(system, loaded, rng, 2)
        report = oscillation_sum_system(system, f, blocks, rho, spec, g=g, table=table)
    else:
        if spec.kind == 'bilinear':
            raise PreconditionError("Bilinear oscillation needs --system")
        report = oscillation_sum(random_signal(rng, args.support, complex_values=False), blocks, rho, spec, table)
    write_json(report.to_dict(), args.output)
    return EXIT_OK


def run_spectral(args, config: RunConfig) -> int:
    grid = TorusGrid(args.grid_size or config.grid_size)
    if args.kind == 'periodogram':
        system, loaded = parse_system(args.system, config.seed)
        f, = _observables(system, loaded, np.random.default_rng(config.seed), 1)
        estimate = orbit_periodogram(system, f, args.x, args.n, grid)
        values = estimate.grid.samples
    else:
        sweep = KernelTail(args.rho or config.rho, args.n_ceiling)(grid)
        values = sweep.grid.samples
    write_csv(pd.DataFrame({'theta': grid.nodes, 'value': values}), args.output)

    if args.kind != 'kernel':
        return EXIT_OK
    store = GoldenStore(config.golden_path, config.golden_mode)
    report = store.apply(f"kernel_tail_sup_rho{args.rho or config.rho}_M{grid.size}_N{args.n_ceiling}",
                         float(np.max(values)))
    store.save()
    if report is not None and not report.passed:
        logging.error(f"Kernel tail sup {report.params['value']} differs from golden {report.params['golden']}")
        return EXIT_FAILED
    return EXIT_OK


def run_transfer(args, config: RunConfig) -> int:
    rng = np.random.default_rng(config.seed)
    system, loaded = parse_system(args.system, config.seed)
    f, g = _observables(system, loaded, rng, 2)
    J, N_bar = args.J, args.n_bar
    ensemble = [(random_signal(rng, 2 * J + 1, -J), random_signal(rng, 2 * J + 1, -J)) for _ in range(args.ensemble)]
    ensemble += truncated_orbit_pairs(system, f, g, J)
    reports = [transfer_bilinear_check(system, f, g, J, N_bar, measure_bilinear_constant(ensemble, N_bar,
                                                                                         n_jobs=config.n_jobs))]
    if args.levels:
        C_weak = measure_weak_constant(ensemble, N_bar, args.levels, n_jobs=config.n_jobs)
        reports += [transfer_weak_type_check(system, f, g, lam, J, N_bar, C_weak, window=args.window)
                    for lam in args.levels]
    return _emit_reports(reports, args)


def run_verify(args, config: RunConfig) -> int:
    registry = build_registry()
    if args.list:
        for criterion in registry:
            print(f"{criterion.key:>3}  {criterion.title}  [{', '.join(criterion.suites)}]")
        return EXIT_OK
    engine = VerifyEngine(registry, config, timings=args.timings)
    engine.register_event_callback(
        lambda event, data: logging.debug(f"Event: {event} - {data}"))
    results = engine.run(args.suite)
    write_json([r.to_dict() for r in results], args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# ===================== PARSER =====================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='random seed (EO_SEED overrides)', required=False, default=None)
    common.add_argument('--config-file', type=str, help='config file path', required=False, default=None)
    common.add_argument('--log-level', type=int, choices=range(6), help='0..5, NOTSET to CRITICAL',
                        required=False, default=None)
    common.add_argument('--output-dir', type=str, help='directory for goldens', required=False, default=None)
    common.add_argument('--output', type=str, help='artifact path, stdout when omitted', required=False, default=None)
    common.add_argument('--n-jobs', type=int, help='worker threads', required=False, default=None)
    common.add_argument('--timings', action='store_true', help='record seconds per criterion')

    averaging = argparse.ArgumentParser(add_help=False)
    averaging.add_argument('--poly-p', type=str, help='P as binom:[..] or mono:[..]', required=False, default=None)
    averaging.add_argument('--poly-q', type=str, help='Q, makes the average bilinear', required=False, default=None)
    averaging.add_argument('--poly-r', type=str, help='R of the modulation exp(i R(n) theta)', required=False,
                           default=None)
    averaging.add_argument('--theta', type=float, help='modulation angle', required=False, default=None)
    averaging.add_argument('--index', type=str, choices=('full', 'lacunary', 'primes'), default='full')
    averaging.add_argument('--rho', type=float, help='lacunary ratio', required=False, default=None)

    parser = argparse.ArgumentParser(prog='openergodic', description='Ergodic averages and their inequalities')
    commands = parser.add_subparsers(dest='command', required=True)

    avg = commands.add_parser('avg', parents=[common, averaging], help='averages along one orbit, CSV N,x,re,im')
    avg.add_argument('--system', type=str, required=True)
    avg.add_argument('--n', type=int, required=True)
    avg.add_argument('--x', type=int, default=0)

    maximal = commands.add_parser('maximal', parents=[common], help='maximal inequality sweeps, JSON')
    maximal.add_argument('--check', type=str, choices=('hl', 'shift', 'poly', 'prime', 'bilinear', 'hopf'),
                         required=True)
    maximal.add_argument('--r', type=float, default=2.0)
    maximal.add_argument('--trials', type=int, default=100)
    maximal.add_argument('--support', type=int, default=64)
    maximal.add_argument('--n-max', type=int, default=128)
    maximal.add_argument('--poly-p', type=str, default=None)
    maximal.add_argument('--poly-q', type=str, default=None)
    maximal.add_argument('--system', type=str, default='random:16')
    maximal.add_argument('--lambda', dest='levels', type=float, nargs='+', default=[0.1, 0.5, 1.0, 2.0])

    oscillation = commands.add_parser('oscillation', parents=[common, averaging], help='oscillation report, JSON')
    oscillation.add_argument('--blocks', type=str, default='auto:2^geometric')
    oscillation.add_argument('--K', type=int, default=8)
    oscillation.add_argument('--support', type=int, default=128)
    oscillation.add_argument('--system', type=str, default=None)

    spectral = commands.add_parser('spectral', parents=[common], help='kernel tails and periodograms, CSV theta,value')
    spectral.add_argument('--kind', type=str, choices=('kernel', 'periodogram'), default='kernel')
    spectral.add_argument('--rho', type=float, default=None)
    spectral.add_argument('--n-ceiling', type=int, default=2 ** 20)
    spectral.add_argument('--grid-size', type=int, default=None)
    spectral.add_argument('--golden', type=str, choices=('write', 'check', 'off'), default=None)
    spectral.add_argument('--system', type=str, default='random:16')
    spectral.add_argument('--x', type=int, default=0)
    spectral.add_argument('--n', type=int, default=256)

    transfer = commands.add_parser('transfer', parents=[common], help='transference checks, JSON')
    transfer.add_argument('--system', type=str, default='random:16')
    transfer.add_argument('--J', type=int, default=64)
    transfer.add_argument('--n-bar', type=int, default=8)
    transfer.add_argument('--lambda', dest='levels', type=float, nargs='*', default=[])
    transfer.add_argument('--window', type=str, choices=('symmetric', 'literal'), default='symmetric')
    transfer.add_argument('--ensemble', type=int, default=20)

    verify = commands.add_parser('verify', parents=[common], help='run an acceptance suite, JSON summary')
    verify.add_argument('--suite', type=str, choices=SUITES, default='core')
    verify.add_argument('--list', action='store_true', help='print the criteria and exit')
    verify.add_argument('--golden', type=str, choices=('write', 'check', 'off'), default=None)
    return parser


COMMANDS = {'avg': run_avg, 'maximal': run_maximal, 'oscillation': run_oscillation, 'spectral': run_spectral,
            'transfer': run_transfer, 'verify': run_verify}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse the command line, run one subcommand and return its exit code:
    0 success, 1 failed inequality or golden mismatch, 2 usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        config = load_config(args.config_file, seed=args.seed, output_dir=args.output_dir, n_jobs=args.n_jobs,
                             log_level=args.log_level, golden_mode=getattr(args, 'golden', None))
    except ConfigError as e:
        print(f"openergodic: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging_levels[config.log_level], stream=sys.stderr, force=True,
                        format='%(asctime)s %(levelname)s %(message)s')

    try:
        return COMMANDS[args.command](args, config)
    except GoldenMissingError as e:
        logging.error(str(e))
        return EXIT_FAILED
    except (DomainError, PreconditionError, ConfigError, RangeError) as e:
        logging.error(f"{type(e).__name__}: {e}")
        print(f"openergodic {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
