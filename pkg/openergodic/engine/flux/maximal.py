"""
Discrete maximal operators and the maximal inequalities they satisfy.

Operators return the pointwise supremum as a Signal over the window where it
can be nonzero; checks return InequalityReport.

Author: openergodic contributors
"""

import logging
import math
from typing import Iterable, List, Optional

import numpy as np
from joblib import Parallel, delayed

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.core.report import InequalityReport
from openergodic.engine.flux.averaging import AverageSpec, iter_signal_rows, iter_system_rows, signal_window
from openergodic.engine.flux.base import Node
from openergodic.processing.arith import IntPolynomial, LacunarySet, PrimeTable
from openergodic.processing.proc_helper import check_order, conjugate_exponent, lp_norm
from openergodic.processing.signal_core import Signal, norm
from openergodic.utils.errors import DomainError, PreconditionError

# sup over N <= 4m versus N <= 8m on a finite system
STABILIZATION_TOL = 1e-12


# ===================== HARDY-LITTLEWOOD WINDOWS =====================

def hl_window_max(a, r: float) -> InequalityReport:
    """
    sum_{x=1}^J (max_{m <= x} mean(a_m..a_x))^r <= 2 (r/(r-1))^r sum a_n^r.
    :param a: sequence of J nonnegative reals
    :param r: float > 1
    :return: InequalityReport
    """
    a = np.asarray(a, dtype=np.float64)
    if np.any(a < 0):
        raise DomainError("Window maximal inequality needs a nonnegative sequence")
    if not r > 1:
        raise DomainError(f"Exponent must be > 1, got {r}")
    J = a.size
    constant = 2.0 * (r / (r - 1.0)) ** r
    if J == 0:
        return InequalityReport('hl_window_max', 0.0, 0.0, constant, params={'J': 0, 'r': r})
    prefix = np.concatenate(([0.0], np.cumsum(a)))
    ends = np.arange(J)[:, None]
    starts = np.arange(J)[None, :]
    lengths = ends - starts + 1
    with np.errstate(divide='ignore', invalid='ignore'):
        means = np.where(lengths > 0, (prefix[ends + 1] - prefix[starts]) / lengths, -np.inf)
    lhs = float(np.sum(means.max(axis=1) ** r))
    rhs = constant * float(np.sum(a ** r))
    return InequalityReport('hl_window_max', lhs, rhs, constant, params={'J': J, 'r': r})


# ===================== SIGNAL MAXIMAL FUNCTIONS =====================

def _sup_over(s: Signal, spec: AverageSpec, N_values, g: Optional[Signal] = None,
              table: Optional[PrimeTable] = None) -> Signal:
    N_values = np.asarray(N_values, dtype=np.int64)
    if N_values.size == 0:
        return Signal.zeros(0, s.offset)
    x_start, width = signal_window(s, spec, int(N_values.max()), g=g, table=table)
    if width == 0:
        return Signal.zeros(0, x_start)
    best = np.zeros(width)
    for _, row in iter_signal_rows(s, spec, x_start, width, N_values, g=g, table=table):
        np.maximum(best, np.abs(row), out=best)
    return Signal(x_start, best)


def shift_maximal(s: Signal, N_max: int, index: Optional[LacunarySet] = None) -> Signal:
    """
    M(s)(x) = sup over admissible N <= N_max of |(1/N) sum_{n=1}^N s(x+n)|.
    :param s: Signal
    :param N_max: int >= 1
    :param index: LacunarySet restricting N, or None for every N
    :return: Signal of nonnegative sup values
    """
    if N_max < 1:
        raise DomainError(f"N_max must be >= 1, got {N_max}")
    N_values = np.arange(1, N_max + 1) if index is None else index.between(1, N_max)
    return _sup_over(s, AverageSpec(), N_values)


def poly_maximal(s: Signal, Q: IntPolynomial, N_max: int) -> Signal:
    """Pointwise sup_{N <= N_max} |(1/N) sum_{n=1}^N s(x + Q(n))|."""
    if Q.is_constant:
        raise DomainError(f"Polynomial maximal function needs a non-constant Q, got {Q}")
    if N_max < 1:
        raise DomainError(f"N_max must be >= 1, got {N_max}")
    return _sup_over(s, AverageSpec(P=Q), np.arange(1, N_max + 1))


def prime_poly_maximal(s: Signal, Q: IntPolynomial, N_max: int, table: PrimeTable) -> Signal:
    """Pointwise sup_{2 <= N <= N_max} |(1/pi_N) sum_{p <= N} s(x + Q(p))|."""
    if table.ceiling < N_max:
        raise PreconditionError(f"Prime table ceiling {table.ceiling} is below N_max = {N_max}")
    if Q.is_constant:
        raise DomainError(f"Polynomial maximal function needs a non-constant Q, got {Q}")
    return _sup_over(s, AverageSpec(index='primes', P=Q), np.arange(2, N_max + 1), table=table)


def bilinear_maximal(f: Signal, g: Signal, P: IntPolynomial, N_max: int, weights=None) -> Signal:
    """M(f, g)(x) = sup_{N <= N_max} |(1/N) sum_{n=1}^N a_n f(x + P(n)) g(x - P(n))|, a_n = 1 without weights."""
    if N_max < 1:
        raise DomainError(f"N_max must be >= 1, got {N_max}")
    spec = AverageSpec(kind='bilinear', P=P, Q=-P, weights=weights)
    return _sup_over(f, spec, np.arange(1, N_max + 1), g=g)


def empirical_constant(maximal: Signal, s: Signal, r: float) -> float:
    """||M s||_r / ||s||_r, 0 for the zero signal."""
    size = norm(s, r)
    return norm(maximal, r) / size if size > 0 else 0.0


# ===================== CHECKS =====================

def shift_maximal_check(s: Signal, r: float, N_max: int, index: Optional[LacunarySet] = None) -> InequalityReport:
    """||M s||_r <= 2^{1/r} r/(r-1) ||s||_r."""
    if not r > 1:
        raise DomainError(f"Exponent must be > 1, got {r}")
    constant = 2.0 ** (1.0 / r) * r / (r - 1.0) if math.isfinite(r) else 1.0
    maximal = shift_maximal(s, N_max, index)
    params = {'r': r, 'N_max': N_max, 'support': len(s), 'C_emp': empirical_constant(maximal, s, r)}
    return InequalityReport('shift_maximal', norm(maximal, r), constant * norm(s, r), constant, params=params)


def poly_maximal_check(s: Signal, Q: IntPolynomial, r: float, N_max: int,
                       table: Optional[PrimeTable] = None) -> InequalityReport:
    """
    Empirical constant C_emp = ||M_Q s||_r / ||s||_r of the polynomial maximal function.
    No explicit constant is known, so the report passes whenever C_emp is finite.
    :param table: PrimeTable for the prime-indexed variant, None for every N
    """
    r = check_order(r)
    maximal = poly_maximal(s, Q, N_max) if table is None else prime_poly_maximal(s, Q, N_max, table)
    c_emp = empirical_constant(maximal, s, r)
    name = 'poly_maximal' if table is None else 'prime_maximal'
    params = {'r': r, 'N_max': N_max, 'support': len(s), 'Q': str(Q), 'C_emp': c_emp}
    return InequalityReport(name, c_emp, math.inf, math.nan, params=params)


def bilinear_holder_check(f: Signal, g: Signal, P: IntPolynomial, N_max: int, r: float) -> InequalityReport:
    """||M(f, g)||_r <= ||f||_1 ||g||_r, valid for every P and 1 <= r <= inf."""
    r = check_order(r)
    lhs = norm(bilinear_maximal(f, g, P, N_max), r)
    return InequalityReport('bilinear_holder', lhs, norm(f, 1) * norm(g, r), 1.0,
                            params={'r': r, 'N_max': N_max, 'P': str(P)})


def bilinear_maximal_check(f: Signal, g: Signal, P: IntPolynomial, N_max: int, r: float,
                           constant: Optional[float] = None) -> InequalityReport:
    """
    ||M(f, g)||_1 against C ||f||_r ||g||_{r'}.
    Without a constant the report carries the empirical ratio and passes when it is finite.
    """
    r_conj = conjugate_exponent(r)
    lhs = norm(bilinear_maximal(f, g, P, N_max), 1)
    scale = norm(f, r) * norm(g, r_conj)
    ratio = lhs / scale if scale > 0 else 0.0
    params = {'r': r, 'r_conj': r_conj, 'N_max': N_max, 'P': str(P), 'ratio': ratio}
    if constant is None:
        return InequalityReport('bilinear_maximal', ratio, math.inf, math.nan, params=params)
    return InequalityReport('bilinear_maximal', lhs, constant * scale, constant, params=params)


# ===================== FINITE SYSTEMS =====================

def system_maximal(sys: FiniteSystem, f: Observable, N_max: int, spec: Optional[AverageSpec] = None,
                   g: Optional[Observable] = None, table: Optional[PrimeTable] = None) -> np.ndarray:
    """sup_{N <= N_max} |A_N f(x)| at every point of the system."""
    spec = spec or AverageSpec()
    best = np.zeros(sys.size)
    for _, row in iter_system_rows(sys, f, spec, spec.admissible(N_max), g=g, table=table):
        np.maximum(best, np.abs(row), out=best)
    return best


def hopf_weak_type(sys: FiniteSystem, f: Observable, lam: float, maximal: Optional[np.ndarray] = None,
                   doubled: Optional[np.ndarray] = None, horizon: Optional[int] = None,
                   tol: float = STABILIZATION_TOL) -> InequalityReport:
    """
    lam * mu{M f > lam} <= ||f||_1, with M taken over N <= horizon (default 4m).
    The sup over N <= horizon must agree with the sup over N <= 2 horizon to
    within tol at every point, otherwise the report fails.
    :param maximal: precomputed sup values over N <= horizon, reused across several lam
    :param doubled: precomputed sup values over N <= 2 horizon
    """
    if not lam > 0:
        raise DomainError(f"Level must be > 0, got {lam}")
    horizon = horizon or 4 * sys.size
    if maximal is None:
        maximal = system_maximal(sys, f, horizon)
    if doubled is None:
        doubled = system_maximal(sys, f, 2 * horizon)
    stabilization = float(np.max(np.abs(doubled - maximal), initial=0.0))
    level_set = float(np.mean(maximal > lam))
    params = {'lambda': lam, 'm': sys.size, 'N_max': horizon, 'stabilization': stabilization,
              'stabilization_tol': tol}
    return InequalityReport('hopf_weak_type', lam * level_set, f.norm(1), 1.0, params=params,
                            holds=stabilization <= tol)


# ===================== NODES =====================

class MaximalOperator(Node):
    """
    Pointwise maximal function of a signal.
    Input: Signal; Output: Signal
    """

    def __init__(self, N_max: int, spec: Optional[AverageSpec] = None, table: Optional[PrimeTable] = None,
                 name: str = None):
        super().__init__(name or "MaximalOperator")
        self.N_max = N_max
        self.spec = spec or AverageSpec()
        self.table = table

    def __call__(self, s: Signal) -> Signal:
        return _sup_over(s, self.spec, self.spec.admissible(self.N_max), table=self.table)


class LrNorm(Node):
    """l^r norm of a Signal."""

    def __init__(self, r: float, name: str = None):
        super().__init__(name or f"L{r}Norm")
        self.r = check_order(r)

    def __call__(self, s: Signal) -> float:
        return norm(s, self.r)


def ensemble_constants(signals: Iterable[Signal], operator: Node, r: float, n_jobs: int = 1) -> List[float]:
    """
    Empirical ||operator(s)||_r / ||s||_r for each signal, in input order.
    """
    pipeline = operator >> LrNorm(r)
    signals = list(signals)

    def measure(s):
        size = lp_norm(s.values, r)
        return pipeline(s) / size if size > 0 else 0.0

    constants = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(measure)(s) for s in signals)
    logging.debug(f"Measured {len(constants)} empirical constants with {operator}")
    return list(constants)
