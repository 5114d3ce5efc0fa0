"""
Calderon transference between a finite system and signals on the integers.

Each point x gives truncated orbits phi_x(j) = f(T^j x), psi_x(j) = g(T^j x),
|j| <= J. For |j| <= J - N_bar the system maximal function at T^j x equals the
integer-side maximal function of (phi_x, psi_x) at j, so an integer-side constant
C transfers to the system with the factor (2J + 1) / (2(J - N_bar) + 1).

Author: openergodic contributors
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from openergodic.dynamics.systems import FiniteSystem, Observable, orbit_values
from openergodic.engine.core.report import InequalityReport
from openergodic.engine.flux.averaging import AverageSpec
from openergodic.engine.flux.maximal import bilinear_maximal, system_maximal
from openergodic.processing.arith import IntPolynomial
from openergodic.processing.signal_core import Signal, norm
from openergodic.utils.errors import DomainError, PreconditionError

WINDOWS = ('symmetric', 'literal')
# relative slack for the floating point chain; the chain itself has strict slack at the edges
RELATIVE_SLACK = 1e-12

SignalPair = Tuple[Signal, Signal]


def _check_horizon(J: int, N_bar: int):
    if N_bar < 1:
        raise DomainError(f"N_bar must be >= 1, got {N_bar}")
    if J < 8 * N_bar:
        raise PreconditionError(f"Transference needs J >= 8 * N_bar = {8 * N_bar}, got J = {J}")


def _check_weights(weights, N_bar: int) -> Optional[np.ndarray]:
    if weights is None:
        return None
    weights = np.asarray(weights, dtype=np.complex128).ravel()
    if weights.size < N_bar:
        raise PreconditionError(f"Weights cover n <= {weights.size}, needed n = {N_bar}")
    return weights[:N_bar]


def correction_factor(J: int, N_bar: int, window: str = 'symmetric') -> float:
    """(2J + 1) / (2(J - N_bar) + 1), or (2J + 1) / (J - N_bar) for the one-sided window."""
    if window == 'literal':
        return (2 * J + 1) / (J - N_bar)
    return (2 * J + 1) / (2 * (J - N_bar) + 1)


# ===================== ORBIT TRUNCATION =====================

def truncated_orbit_pairs(sys: FiniteSystem, f: Observable, g: Observable, J: int) -> List[SignalPair]:
    """(phi_x, psi_x) on [-J, J] for every point x, in point order."""
    return [(orbit_values(sys, f, x, J), orbit_values(sys, g, x, J)) for x in range(sys.size)]


def system_bilinear_maximal(sys: FiniteSystem, f: Observable, g: Observable, N_bar: int,
                            weights=None) -> np.ndarray:
    """sup_{N <= N_bar} |(1/N) sum_{n=1}^N a_n f(T^n x) g(T^{-n} x)| at every point."""
    identity = IntPolynomial.identity()
    spec = AverageSpec(kind='bilinear', P=identity, Q=-identity, weights=_check_weights(weights, N_bar))
    return system_maximal(sys, f, N_bar, spec, g=g)


def cauchy_schwarz_residual(sys: FiniteSystem, f: Observable, g: Observable, J: int) -> float:
    """
    Largest gap, over points x, between ||phi_x||_2 ||psi_x||_2 and the same product
    recomputed from sqrt(sum |f(T^n x)|^2) sqrt(sum |g(T^-n x)|^2), |n| <= J.
    """
    ns = np.arange(-J, J + 1)
    residual = 0.0
    for x in range(sys.size):
        phi, psi = orbit_values(sys, f, x, J), orbit_values(sys, g, x, J)
        product = norm(phi, 2) * norm(psi, 2)
        forward = math.sqrt(math.fsum(np.abs(f.values[sys.orbit_points(x, ns)]) ** 2))
        backward = math.sqrt(math.fsum(np.abs(g.values[sys.orbit_points(x, -ns)]) ** 2))
        residual = max(residual, abs(product - forward * backward))
    return residual


# ===================== EMPIRICAL CONSTANTS =====================

def _bilinear_ratio(pair: SignalPair, N_bar: int, weights) -> float:
    phi, psi = pair
    scale = norm(phi, 2) * norm(psi, 2)
    if scale == 0:
        return 0.0
    return norm(bilinear_maximal(phi, psi, IntPolynomial.identity(), N_bar, weights), 1) / scale


def _weak_ratio(pair: SignalPair, N_bar: int, lams: Sequence[float], weights) -> float:
    phi, psi = pair
    scale = norm(phi, 2) * norm(psi, 2)
    if scale == 0:
        return 0.0
    maximal = bilinear_maximal(phi, psi, IntPolynomial.identity(), N_bar, weights).values.real
    return max(lam * np.count_nonzero(maximal > lam) / scale for lam in lams)


def measure_bilinear_constant(pairs: Iterable[SignalPair], N_bar: int, weights=None, n_jobs: int = 1) -> float:
    """
    max ||M(phi, psi)||_1 / (||phi||_2 ||psi||_2) over an ensemble of integer-side pairs,
    M the bilinear maximal function over N <= N_bar.
    """
    weights = _check_weights(weights, N_bar)
    ratios = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_bilinear_ratio)(pair, N_bar, weights) for pair in pairs)
    constant = max(ratios, default=0.0)
    logging.debug(f"Bilinear constant over {len(ratios)} pairs: {constant:.6g}")
    return constant


def measure_weak_constant(pairs: Iterable[SignalPair], N_bar: int, lams: Sequence[float], weights=None,
                          n_jobs: int = 1) -> float:
    """max lam * #{j : M(phi, psi)(j) > lam} / (||phi||_2 ||psi||_2) over pairs and levels."""
    if any(not lam > 0 for lam in lams):
        raise DomainError(f"Levels must be > 0, got {list(lams)}")
    weights = _check_weights(weights, N_bar)
    ratios = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_weak_ratio)(pair, N_bar, lams, weights) for pair in pairs)
    return max(ratios, default=0.0)


# ===================== TRANSFER CHECKS =====================

def transfer_bilinear_check(sys: FiniteSystem, f: Observable, g: Observable, J: int, N_bar: int,
                            C_emp: float, weights=None) -> InequalityReport:
    """
    int sup_{N <= N_bar} |(1/N) sum a_n f(T^n x) g(T^-n x)| dmu
        <= C_emp (2J + 1) / (2(J - N_bar) + 1) ||f||_2 ||g||_2.
    :param J: int >= 8 * N_bar, orbit truncation length
    :param C_emp: float, integer-side constant measured beforehand
    :param weights: a_n for n <= N_bar, None for a_n = 1
    """
    _check_horizon(J, N_bar)
    lhs = float(np.mean(system_bilinear_maximal(sys, f, g, N_bar, weights)))
    factor = correction_factor(J, N_bar)
    rhs = C_emp * factor * f.norm(2) * g.norm(2) * (1.0 + RELATIVE_SLACK)
    params = {'m': sys.size, 'J': J, 'N_bar': N_bar, 'C_emp': C_emp, 'factor': factor,
              'weighted': weights is not None,
              'cauchy_schwarz_residual': cauchy_schwarz_residual(sys, f, g, J)}
    return InequalityReport('transfer_bilinear', lhs, rhs, C_emp * factor, params=params)


def transfer_weak_type_check(sys: FiniteSystem, f: Observable, g: Observable, lam: float, J: int, N_bar: int,
                             C_emp: float, weights=None, window: str = 'symmetric') -> InequalityReport:
    """
    mu{x : sup_{N <= N_bar} |(1/N) sum a_n f(T^n x) g(T^-n x)| > lam}
        <= C_emp * factor * ||f||_2 ||g||_2 / lam.
    window 'symmetric' counts j in [-(J - N_bar), J - N_bar] (factor (2J+1)/(2(J-N_bar)+1));
    'literal' counts j in [1, J - N_bar] (factor (2J+1)/(J-N_bar)).
    """
    if not lam > 0:
        raise DomainError(f"Level must be > 0, got {lam}")
    if window not in WINDOWS:
        raise DomainError(f"Window must be one of {WINDOWS}, got {window!r}")
    _check_horizon(J, N_bar)
    level_set = float(np.mean(system_bilinear_maximal(sys, f, g, N_bar, weights) > lam))
    factor = correction_factor(J, N_bar, window)
    rhs = C_emp * factor * f.norm(2) * g.norm(2) / lam * (1.0 + RELATIVE_SLACK)
    params = {'m': sys.size, 'J': J, 'N_bar': N_bar, 'lambda': lam, 'C_emp': C_emp, 'factor': factor,
              'window': window, 'weighted': weights is not None}
    return InequalityReport('transfer_weak_type', level_set, rhs, C_emp * factor, params=params)


def weighted_transfer(sys: FiniteSystem, f: Observable, g: Observable, spec: AverageSpec, J: int, N_bar: int,
                      C_emp: float, lams: Sequence[float] = (), C_weak: Optional[float] = None) -> List[InequalityReport]:
    """
    The strong transfer check and one weak check per level, with the weights of spec.
    A spec without weights reduces exactly to the unweighted checks.
    """
    if spec.kind != 'bilinear':
        raise PreconditionError("Weighted transference takes a bilinear average spec")
    weights = spec.weights
    reports = [transfer_bilinear_check(sys, f, g, J, N_bar, C_emp, weights)]
    if lams:
        if C_weak is None:
            raise PreconditionError("Weak-type transfer needs a measured weak constant")
        reports += [transfer_weak_type_check(sys, f, g, lam, J, N_bar, C_weak, weights) for lam in lams]
    return reports
