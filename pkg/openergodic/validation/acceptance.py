"""
Acceptance criteria run by `openergodic verify`.

Every criterion draws its randomness from the generator it is handed and
returns an Outcome; the core suite runs reduced trial counts, the full suite
the complete ones plus the reproducibility re-run.

Author: openergodic contributors
"""

import itertools
import logging
import math
from dataclasses import replace
from typing import List

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import spearmanr

from openergodic.dynamics.systems import (FiniteSystem, Observable, RotationOrbit, coboundary,
                                          rotation_samples)
from openergodic.engine.core.report import InequalityReport
from openergodic.engine.core.verify_engine import CheckContext, Criterion, Outcome, VerifyEngine
from openergodic.engine.flux.averaging import (AverageSpec, bilinear_avg, bilinear_periodic_limit, birkhoff,
                                               signal_avg, system_average_table)
from openergodic.engine.flux.base import Parallel as ParallelNode
from openergodic.engine.flux.maximal import hl_window_max, hopf_weak_type, shift_maximal_check, system_maximal
from openergodic.engine.flux.oscillation import (corner_blocks, etemadi_sandwich_check, geometric_cuts,
                                                 oscillation_sum)
from openergodic.engine.flux.spectral import KernelTail, bourgain_identity_check, kernel_tail_sum, tail_envelope
from openergodic.engine.flux.transference import (measure_bilinear_constant, measure_weak_constant,
                                                  transfer_bilinear_check, transfer_weak_type_check,
                                                  truncated_orbit_pairs)
from openergodic.processing.arith import IntPolynomial, sieve
from openergodic.processing.proc_helper import next_power_of_two
from openergodic.processing.signal_core import TorusGrid, random_signal
from openergodic.utils.serialization import to_json

KERNEL_RHOS = (1.5, 2.0, 3.0, 4.0)
KERNEL_CEILING = 2 ** 20
OSCILLATION_KS = (4, 8, 16, 32, 64)
# cuts at floor(1.2^m) >= 8, sup over the denser S_1.1 so every block has interior points
OSCILLATION_CUT_RATIO = 1.2
OSCILLATION_CUT_START = 8
OSCILLATION_RHO = 1.1
HOPF_LEVELS = (0.1, 0.5, 1.0, 2.0)
TRANSFER_LEVELS = (0.1, 0.5, 1.0)
TRANSFER_N_BAR = 8


def _trials(ctx: CheckContext, core: int, full: int) -> int:
    return full if ctx.full else core


# ===================== AVERAGES AND MAXIMAL FUNCTIONS =====================

def coboundary_telescoping(ctx: CheckContext) -> Outcome:
    reports = []
    for _ in range(_trials(ctx, 50, 500)):
        m = int(ctx.rng.integers(1, 33))
        system = FiniteSystem.random(m, ctx.rng)
        g = Observable.random(m, ctx.rng)
        x, N = int(ctx.rng.integers(m)), int(ctx.rng.integers(1, 1001))
        average = birkhoff(system, coboundary(system, g), x, N)
        expected = (g.values[system.orbit_points(x, 1)] - g.values[system.orbit_points(x, N + 1)]) / N
        reports.append(InequalityReport('telescoping', abs(average - expected), 1e-12, params={'m': m, 'N': N}))
    return Outcome(reports)


def hl_window_constant(ctx: CheckContext) -> Outcome:
    reports = []
    for _ in range(_trials(ctx, 500, 10_000)):
        J = int(ctx.rng.integers(1, 257))
        r = float(ctx.rng.choice([1.5, 2.0, 3.0]))
        a = ctx.rng.exponential(size=J) * (ctx.rng.random(J) < ctx.rng.random())
        reports.append(hl_window_max(a, r))
    return Outcome(reports)


def shift_maximal_constant(ctx: CheckContext) -> Outcome:
    reports = []
    for _ in range(_trials(ctx, 100, 1000)):
        length = int(ctx.rng.integers(1, 65))
        s = random_signal(ctx.rng, length, offset=int(ctx.rng.integers(-32, 33)))
        r = float(ctx.rng.choice([1.5, 2.0, 4.0]))
        reports.append(shift_maximal_check(s, r, int(ctx.rng.integers(1, 129))))
    return Outcome(reports)


def hopf_maximal(ctx: CheckContext) -> Outcome:
    systems = [FiniteSystem(perm) for m in range(1, _trials(ctx, 4, 6) + 1)
               for perm in itertools.permutations(range(m))]
    exhaustive = len(systems)
    systems += [FiniteSystem.random(int(ctx.rng.integers(1, 65)), ctx.rng) for _ in range(_trials(ctx, 50, 1000))]
    reports = []
    for system in systems:
        f = Observable.random(system.size, ctx.rng)
        horizon = 4 * system.size
        maximal, doubled = system_maximal(system, f, horizon), system_maximal(system, f, 2 * horizon)
        reports += [hopf_weak_type(system, f, lam, maximal, doubled, tol=ctx.config.tolerances.stabilization)
                    for lam in HOPF_LEVELS]
    return Outcome(reports, params={'exhaustive_systems': exhaustive, 'systems': len(systems)})


def bilinear_limit(ctx: CheckContext) -> Outcome:
    N = 10_000
    reports = []
    for _ in range(_trials(ctx, 10, 50)):
        m = int(ctx.rng.integers(1, 13))
        system = FiniteSystem.cyclic(m)
        f, g = Observable.random(m, ctx.rng), Observable.random(m, ctx.rng)
        P = IntPolynomial(tuple(int(c) for c in ctx.rng.integers(-3, 4, size=3)))
        Q = IntPolynomial(tuple(int(c) for c in ctx.rng.integers(-3, 4, size=3)))
        x = int(ctx.rng.integers(m))
        limit, period = bilinear_periodic_limit(system, f, g, x, P, Q)
        average = bilinear_avg(system, f, g, x, N, P, Q)
        bound = f.max_abs() * g.max_abs()
        remainder = N % period
        reports.append(InequalityReport('bilinear_limit', abs(average - limit), m * bound / N, m / N,
                                        params={'m': m, 'P': str(P), 'Q': str(Q), 'period': period,
                                                'worst_case': 2 * min(remainder, period - remainder) * bound / N}))
    return Outcome(reports)


def prime_rotation_decay(ctx: CheckContext) -> Outcome:
    alpha = math.sqrt(2.0) - 1.0
    short, long = 1000, 10 ** 6
    table = sieve(long)
    s = rotation_samples(RotationOrbit(alpha, 0.0, long + 1), 1)
    spec = AverageSpec(index='primes')
    small = abs(signal_avg(s, 0, long, spec, table))
    large = abs(signal_avg(s, 0, short, spec, table))
    # strict: compare against the next double below
    return Outcome([InequalityReport('prime_rotation_decay', small, float(np.nextafter(large, 0.0)),
                                     params={'alpha': alpha, 'N_short': short, 'N_long': long,
                                             'short_value': large, 'long_value': small})])


# ===================== SPECTRAL SIDE =====================

def bourgain_identity(ctx: CheckContext) -> Outcome:
    tol = ctx.config.tolerances.identity
    reports = []
    for _ in range(_trials(ctx, 20, 100)):
        f = random_signal(ctx.rng, int(ctx.rng.integers(1, 33)), offset=int(ctx.rng.integers(-16, 17)))
        g = random_signal(ctx.rng, int(ctx.rng.integers(1, 33)), offset=int(ctx.rng.integers(-16, 17)))
        x, N = int(ctx.rng.integers(-32, 33)), int(ctx.rng.integers(1, 65))
        reach = max(abs(f.offset), abs(f.last))
        grid = TorusGrid(next_power_of_two(2 * (reach + N + abs(x)) + 1))
        reports.append(bourgain_identity_check(f, g, x, N, grid, tol))
    return Outcome(reports)


def kernel_tail(ctx: CheckContext) -> Outcome:
    size = 1_000_003 if ctx.full else 65_537
    grid = TorusGrid(size)
    branches = {f"rho={rho}": KernelTail(rho, KERNEL_CEILING) for rho in KERNEL_RHOS}
    sweeps = ParallelNode(n_jobs=ctx.n_jobs, **branches)(grid)
    sups = [sweeps[f"rho={rho}"].sup for rho in KERNEL_RHOS]

    reports = [InequalityReport('kernel_tail_zero', abs(kernel_tail_sum(0.0, rho, KERNEL_CEILING)), 0.0,
                                params={'rho': rho}) for rho in KERNEL_RHOS]
    main = sweeps["rho=2.0"]
    reports.append(InequalityReport('kernel_tail_envelope', main.sup, tail_envelope(2.0), tail_envelope(2.0),
                                    params={'rho': 2.0, 'argmax': main.argmax, 'grid_size': size}))
    reports += [InequalityReport('kernel_tail_even', sweeps[name].evenness_residual(),
                                 1e-12 * max(1.0, sweeps[name].sup), params={'branch': name})
                for name in branches]
    reports += [InequalityReport('kernel_tail_monotone', later, earlier, params={'rho': rho})
                for rho, earlier, later in zip(KERNEL_RHOS[1:], sups[:-1], sups[1:])]
    params = {'sups': dict(zip((str(rho) for rho in KERNEL_RHOS), sups)), 'grid_size': size}
    return Outcome(reports, goldens=[(f"kernel_tail_sup_rho2_M{size}", main.sup, 'equal')], params=params)


# ===================== OSCILLATION =====================

def oscillation_growth(ctx: CheckContext) -> Outcome:
    cuts = geometric_cuts(max(OSCILLATION_KS), OSCILLATION_CUT_RATIO, start=OSCILLATION_CUT_START)
    interior = int(cuts.with_lacunary(OSCILLATION_RHO).interior_counts().min())
    signals = [random_signal(ctx.rng, 128, complex_values=False) for _ in range(_trials(ctx, 8, 32))]
    full_reports = Parallel(n_jobs=ctx.n_jobs, prefer="threads")(
        delayed(oscillation_sum)(s, cuts, OSCILLATION_RHO) for s in signals)
    medians, largest = [], 0.0
    for K in OSCILLATION_KS:
        ratios = [report.prefix(K).ratio_sqrtK for report in full_reports]
        medians.append(float(np.median(ratios)))
        largest = max(largest, max(ratios))
    trend = spearmanr(OSCILLATION_KS, medians).correlation
    trend = 0.0 if math.isnan(trend) else float(trend)
    params = {'Ks': list(OSCILLATION_KS), 'medians': medians, 'max_ratio': largest, 'last_cut': int(cuts.cuts[-1]),
              'rho': OSCILLATION_RHO, 'min_interior': interior}
    report = InequalityReport('oscillation_trend', trend, 0.0, params=params, holds=interior > 0)
    return Outcome([report], goldens=[(f"oscillation_ratio_max_{ctx.suite}", largest, 'upper')], params=params)


def corner_construction(ctx: CheckContext) -> Outcome:
    ceiling = 1000
    settings = ctx.config.corner
    alternating = np.array([(-1.0) ** N for N in range(1, ceiling + 1)])
    result = corner_blocks(alternating, 1.0, p=1.0, settings=settings)
    reports = [result.report,
               InequalityReport('corner_nonempty', 0.0 if result.partition.K > 0 else 1.0, 0.0,
                                params={'K': result.partition.K})]
    for _ in range(_trials(ctx, 3, 10)):
        m = int(ctx.rng.integers(1, 17))
        system = FiniteSystem.random(m, ctx.rng)
        g = Observable.random(m, ctx.rng)
        family = system_average_table(system, coboundary(system, g), AverageSpec(), np.arange(1, ceiling + 1))
        flagged = corner_blocks(family, 2.02 * g.max_abs(), p=1.0, settings=settings)
        reports.append(InequalityReport('corner_convergent', 0.0 if flagged.convergent else 1.0, 0.0,
                                        params={'m': m}))
    return Outcome(reports, params={'alternating_blocks': result.partition.K,
                                    'alternating_lower_bound': result.lower_bound})


def etemadi_sandwich(ctx: CheckContext) -> Outcome:
    reports = []
    for _ in range(_trials(ctx, 20, 200)):
        m = int(ctx.rng.integers(1, 17))
        system = FiniteSystem.random(m, ctx.rng)
        f = Observable.random(m, ctx.rng, nonnegative=True)
        reports.append(etemadi_sandwich_check(system, f, 2.0, 64))
    return Outcome(reports)


# ===================== TRANSFERENCE =====================

def _random_pairs(ctx: CheckContext, J: int, count: int):
    return [(random_signal(ctx.rng, 2 * J + 1, -J), random_signal(ctx.rng, 2 * J + 1, -J)) for _ in range(count)]


def transference(ctx: CheckContext) -> Outcome:
    N_bar = TRANSFER_N_BAR
    horizons = (8 * N_bar, 64 * N_bar)
    ensembles = {J: _random_pairs(ctx, J, _trials(ctx, 5, 20)) for J in horizons}
    strong = {J: measure_bilinear_constant(pairs, N_bar, n_jobs=ctx.n_jobs) for J, pairs in ensembles.items()}
    weak = {J: measure_weak_constant(pairs, N_bar, TRANSFER_LEVELS, n_jobs=ctx.n_jobs)
            for J, pairs in ensembles.items()}

    reports: List[InequalityReport] = []
    for _ in range(_trials(ctx, 10, 100)):
        m = int(ctx.rng.integers(1, 33))
        system = FiniteSystem.random(m, ctx.rng)
        f, g = Observable.random(m, ctx.rng), Observable.random(m, ctx.rng)
        for J in horizons:
            pairs = truncated_orbit_pairs(system, f, g, J)
            C = max(strong[J], measure_bilinear_constant(pairs, N_bar, n_jobs=ctx.n_jobs))
            C_weak = max(weak[J], measure_weak_constant(pairs, N_bar, TRANSFER_LEVELS, n_jobs=ctx.n_jobs))
            reports.append(transfer_bilinear_check(system, f, g, J, N_bar, C))
            reports += [transfer_weak_type_check(system, f, g, lam, J, N_bar, C_weak) for lam in TRANSFER_LEVELS]
            reports.append(transfer_weak_type_check(system, f, g, 0.5, J, N_bar, C_weak, window='literal'))
    return Outcome(reports, params={'C_strong': strong, 'C_weak': weak})


# ===================== REPRODUCIBILITY =====================

def determinism(ctx: CheckContext) -> Outcome:
    config = replace(ctx.config, golden_mode="off")
    texts = [to_json([r.to_dict() for r in VerifyEngine(build_registry(), config).run('core')]) for _ in range(2)]
    identical = texts[0] == texts[1]
    logging.info(f"Core suite re-run {'matches' if identical else 'differs'}")
    return Outcome([InequalityReport('determinism', 0.0 if identical else 1.0, 0.0,
                                     params={'bytes': len(texts[0])})])


def build_registry() -> List[Criterion]:
    """The acceptance criteria in report order."""
    return [
        Criterion('1', 'coboundary telescoping', coboundary_telescoping),
        Criterion('2', 'window maximal constant', hl_window_constant),
        Criterion('3', 'shift maximal constant', shift_maximal_constant),
        Criterion('4', 'Hopf weak type', hopf_maximal),
        Criterion('5', 'bilinear Fourier identity', bourgain_identity),
        Criterion('6', 'lacunary kernel tail', kernel_tail),
        Criterion('7', 'oscillation sqrt(K) growth', oscillation_growth),
        Criterion('8', 'corner blocks', corner_construction),
        Criterion('9', 'Etemadi sandwich', etemadi_sandwich),
        Criterion('10', 'Calderon transference', transference),
        Criterion('11', 'prime rotation averages', prime_rotation_decay),
        Criterion('12', 'bilinear periodic limit', bilinear_limit),
        Criterion('13', 'reproducibility', determinism, suites=('full',)),
    ]
