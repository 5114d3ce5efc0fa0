"""
Ergodic averages on finite systems and their counterparts on integer signals.

Every sum runs over n = 1..N (or primes p <= N, normalised by pi_N). The
row iterators stream A_N(x) for a whole window of x at once, ascending in N,
and are the shared engine behind the maximal and oscillation sweeps.

Author: openergodic contributors
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.flux.base import Node
from openergodic.processing.arith import IntPolynomial, PrimeTable, lacunary, poly_values
from openergodic.processing.signal_core import Signal
from openergodic.utils.errors import DomainError, PreconditionError

KINDS = ('linear', 'bilinear')
INDICES = ('full', 'lacunary', 'primes')
# summand rows materialised at once: rows * width stays under this
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True, eq=False)
class AverageSpec:
    """
    What is averaged and along which times.
    P drives the first factor, Q the second (bilinear only). weights[n - 1] is a_n;
    modulation (R, theta) multiplies the n-th term by exp(i R(n) theta).
    The lacunary index only restricts which N are reported, never the summation range.
    """
    kind: str = 'linear'
    index: str = 'full'
    P: IntPolynomial = field(default_factory=IntPolynomial.identity)
    Q: Optional[IntPolynomial] = None
    rho: Optional[float] = None
    weights: Optional[np.ndarray] = None
    modulation: Optional[Tuple[IntPolynomial, float]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Average kind must be one of {KINDS}, got {self.kind!r}")
        if self.index not in INDICES:
            raise DomainError(f"Average index must be one of {INDICES}, got {self.index!r}")
        if self.kind == 'bilinear' and self.Q is None:
            raise DomainError("A bilinear average needs both P and Q")
        if self.index == 'lacunary' and (self.rho is None or not self.rho > 1):
            raise DomainError(f"Lacunary index needs rho > 1, got {self.rho}")
        if self.weights is not None:
            weights = np.array(self.weights, dtype=np.complex128).ravel()
            weights.setflags(write=False)
            object.__setattr__(self, 'weights', weights)

    @property
    def is_shift(self) -> bool:
        """Plain unweighted Cesaro average along n + c over all n."""
        return (self.kind == 'linear' and self.index != 'primes' and self.weights is None
                and self.modulation is None and self.P.linear_shift() is not None)

    def admissible(self, N_max: int) -> np.ndarray:
        """The N at which averages are reported, up to N_max."""
        if self.index == 'lacunary':
            return lacunary(self.rho, N_max).members.copy()
        start = 2 if self.index == 'primes' else 1
        return np.arange(start, N_max + 1, dtype=np.int64)

    def index_terms(self, N_max: int, table: Optional[PrimeTable] = None) -> np.ndarray:
        """The summation indices n (or primes p) up to N_max."""
        if self.index == 'primes':
            _require_table(table, N_max)
            return table.upto(N_max)
        return np.arange(1, N_max + 1, dtype=np.int64)

    def counts(self, N_values: np.ndarray, table: Optional[PrimeTable] = None) -> np.ndarray:
        """Number of summation terms at each N (N itself, or pi_N)."""
        N_values = np.asarray(N_values, dtype=np.int64)
        if self.index == 'primes':
            _require_table(table, int(N_values.max(initial=0)))
            counts = table.pi[N_values]
            if np.any(counts == 0):
                raise DomainError("Prime averages are undefined for N < 2 (pi_N = 0)")
            return counts
        return N_values

    def coefficients(self, ns: np.ndarray) -> Optional[np.ndarray]:
        """w_n = a_n * exp(i R(n) theta) for the given indices, or None when all are 1."""
        coefficients = None
        if self.weights is not None:
            if ns.size and ns.max() > self.weights.size:
                raise PreconditionError(f"Weights cover n <= {self.weights.size}, needed n = {ns.max()}")
            coefficients = self.weights[ns - 1]
        if self.modulation is not None:
            R, theta = self.modulation
            if theta != 0:
                phase = np.exp(1j * poly_values(R, ns).astype(np.float64) * theta)
                coefficients = phase if coefficients is None else coefficients * phase
        return coefficients


def _require_table(table: Optional[PrimeTable], N: int):
    if table is None or table.ceiling < N:
        ceiling = None if table is None else table.ceiling
        raise PreconditionError(f"Prime table ceiling {ceiling} does not cover N = {N}")


def _check_N(N: int, minimum: int = 1):
    if N < minimum:
        raise DomainError(f"N must be >= {minimum}, got {N}")


# ===================== FINITE SYSTEMS =====================

def _orbit_mean(sys: FiniteSystem, f: Observable, x: int, times: np.ndarray,
                g: Optional[Observable] = None, g_times: Optional[np.ndarray] = None,
                normalizer: Optional[int] = None) -> complex:
    sys.check_point(x)
    terms = f.values[sys.orbit_points(x, times)]
    if g is not None:
        terms = terms * g.values[sys.orbit_points(x, g_times)]
    return complex(terms.sum() / (normalizer or times.size))


def birkhoff(sys: FiniteSystem, f: Observable, x: int, N: int) -> complex:
    """
    (1/N) sum_{n=1}^N f(T^n x).
    :param sys: FiniteSystem
    :param f: Observable
    :param x: int, starting point
    :param N: int >= 1
    :return: complex
    """
    _check_N(N)
    return _orbit_mean(sys, f, x, np.arange(1, N + 1))


def bilinear_avg(sys: FiniteSystem, f: Observable, g: Observable, x: int, N: int,
                 P: IntPolynomial, Q: IntPolynomial) -> complex:
    """(1/N) sum_{n=1}^N f(T^{P(n)} x) g(T^{Q(n)} x)."""
    _check_N(N)
    ns = np.arange(1, N + 1)
    return _orbit_mean(sys, f, x, poly_values(P, ns), g, poly_values(Q, ns))


def prime_avg(sys: FiniteSystem, f: Observable, x: int, N: int, Q: IntPolynomial, table: PrimeTable) -> complex:
    """(1/pi_N) sum_{p <= N} f(T^{Q(p)} x)."""
    _check_N(N, 2)
    _require_table(table, N)
    primes = table.upto(N)
    return _orbit_mean(sys, f, x, poly_values(Q, primes), normalizer=primes.size)


def prime_bilinear_avg(sys: FiniteSystem, f: Observable, g: Observable, x: int, N: int,
                       P: IntPolynomial, Q: IntPolynomial, table: PrimeTable) -> complex:
    """(1/pi_N) sum_{p <= N} f(T^{P(p)} x) g(T^{Q(p)} x)."""
    _check_N(N, 2)
    _require_table(table, N)
    primes = table.upto(N)
    return _orbit_mean(sys, f, x, poly_values(P, primes), g, poly_values(Q, primes), normalizer=primes.size)


def _stream(n_terms: int, summands, counts: np.ndarray, normalizers: np.ndarray,
            N_values: np.ndarray, width: int) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Accumulate summand rows and emit (N, partial_sum / normalizer) at each count.
    summands(lo, hi) returns the rows for index terms lo..hi-1, shape (hi - lo, width).
    """
    chunk = max(1, _CHUNK_ELEMENTS // max(width, 1))
    acc = np.zeros(width, dtype=np.complex128)
    done = 0
    for N, count, normalizer in zip(N_values, counts, normalizers):
        count = min(int(count), n_terms)
        while done < count:
            hi = min(count, done + chunk)
            acc += summands(done, hi).sum(axis=0)
            done = hi
        yield int(N), acc / normalizer


def iter_system_rows(sys: FiniteSystem, f: Observable, spec: AverageSpec, N_values,
                     g: Optional[Observable] = None,
                     table: Optional[PrimeTable] = None) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Yield (N, A_N(x) for every point x) for ascending N_values.
    :param spec: AverageSpec, bilinear kinds need g
    """
    N_values = np.unique(np.asarray(N_values, dtype=np.int64))
    if N_values.size == 0:
        return
    _check_N(int(N_values[0]))
    if spec.kind == 'bilinear' and g is None:
        raise PreconditionError("Bilinear system averages need a second observable g")
    ns = spec.index_terms(int(N_values[-1]), table)
    counts = spec.counts(N_values, table)
    first = poly_values(spec.P, ns)
    second = poly_values(spec.Q, ns) if spec.kind == 'bilinear' else None
    coefficients = spec.coefficients(ns)
    points = np.arange(sys.size)

    def summands(lo, hi):
        rows = f.values[sys.orbit_points(points[None, :], first[lo:hi, None])]
        if second is not None:
            rows = rows * g.values[sys.orbit_points(points[None, :], second[lo:hi, None])]
        if coefficients is not None:
            rows = rows * coefficients[lo:hi, None]
        return rows

    yield from _stream(ns.size, summands, counts, counts.astype(np.float64), N_values, sys.size)


def system_average_table(sys: FiniteSystem, f: Observable, spec: AverageSpec, N_values,
                         g: Optional[Observable] = None, table: Optional[PrimeTable] = None) -> np.ndarray:
    """Materialised rows of iter_system_rows, shape (len(unique N_values), m)."""
    rows = [row for _, row in iter_system_rows(sys, f, spec, N_values, g=g, table=table)]
    return np.array(rows) if rows else np.zeros((0, sys.size), dtype=np.complex128)


def bilinear_periodic_limit(sys: FiniteSystem, f: Observable, g: Observable, x: int,
                            P: IntPolynomial, Q: IntPolynomial) -> Tuple[complex, int]:
    """
    Exact limit of bilinear_avg as N grows, with the period it was averaged over.
    n -> C(n, j) mod L has period dividing L * j!, so the summand is periodic with
    period L * d! where L is the cycle length of x and d the larger degree.
    """
    sys.check_point(x)
    length = int(sys.period(x))
    period = length * math.factorial(max(P.degree, Q.degree, 1))
    ns = np.arange(1, period + 1)
    terms = f.values[sys.orbit_points(x, poly_values(P, ns))] * g.values[sys.orbit_points(x, poly_values(Q, ns))]
    return complex(terms.sum() / period), period


# ===================== INTEGER SIGNALS =====================

def signal_avg(s: Signal, x: int, N: int, spec: Optional[AverageSpec] = None,
               table: Optional[PrimeTable] = None) -> complex:
    """
    (1/N) sum_{n=1}^N w_n s(x + P(n)), or the prime-indexed version normalised by pi_N.
    :param s: Signal
    :param x: int
    :param N: int >= 1
    :param spec: AverageSpec of linear kind; default is P(n) = n, unweighted
    """
    spec = spec or AverageSpec()
    if spec.kind != 'linear':
        raise PreconditionError("signal_avg takes a linear spec; use bilinear_signal_avg")
    _check_N(N, 2 if spec.index == 'primes' else 1)
    ns = spec.index_terms(N, table)
    terms = s.take(x + poly_values(spec.P, ns))
    coefficients = spec.coefficients(ns)
    if coefficients is not None:
        terms = terms * coefficients
    return complex(terms.sum() / ns.size) if spec.index == 'primes' else complex(terms.sum() / N)


def bilinear_signal_avg(f: Signal, g: Signal, x: int, N: int, P: Optional[IntPolynomial] = None,
                        weights: Optional[np.ndarray] = None) -> complex:
    """(1/N) sum_{n=1}^N a_n f(x + P(n)) g(x - P(n)); a_n = 1 when weights is None."""
    _check_N(N)
    P = P or IntPolynomial.identity()
    shifts = poly_values(P, np.arange(1, N + 1))
    terms = f.take(x + shifts) * g.take(x - shifts)
    if weights is not None:
        weights = np.asarray(weights, dtype=np.complex128)
        if weights.size < N:
            raise PreconditionError(f"Weights cover n <= {weights.size}, needed n = {N}")
        terms = terms * weights[:N]
    return complex(terms.sum() / N)


def cesaro_kernel(N: int) -> Signal:
    """k = (1/N) 1_{[-N, -1]}, so (s * k)(x) = (1/N) sum_{n=1}^N s(x + n)."""
    _check_N(N)
    return Signal(-N, np.full(N, 1.0 / N))


def signal_window(s: Signal, spec: AverageSpec, N_max: int, g: Optional[Signal] = None,
                  table: Optional[PrimeTable] = None) -> Tuple[int, int]:
    """
    (x_start, width) of the x-range where some A_N, N <= N_max, can be nonzero.
    Bilinear signal averages read g at x + Q(n).
    """
    ns = spec.index_terms(N_max, table)
    if len(s) == 0 or ns.size == 0:
        return 0, 0
    first = poly_values(spec.P, ns)
    lo, hi = s.offset - int(first.max()), s.last - int(first.min())
    if spec.kind == 'bilinear':
        if g is None or len(g) == 0:
            return 0, 0
        second = poly_values(spec.Q, ns)
        lo, hi = max(lo, g.offset - int(second.max())), min(hi, g.last - int(second.min()))
    return lo, max(hi - lo + 1, 0)


def iter_signal_rows(s: Signal, spec: AverageSpec, x_start: int, width: int, N_values,
                     g: Optional[Signal] = None,
                     table: Optional[PrimeTable] = None) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Yield (N, A_N(x) for x in [x_start, x_start + width)) for ascending N_values.
    Shift averages use prefix sums (O(width) per N); everything else accumulates summand rows.
    """
    N_values = np.unique(np.asarray(N_values, dtype=np.int64))
    if N_values.size == 0:
        return
    _check_N(int(N_values[0]))
    N_max = int(N_values[-1])

    if spec.is_shift:
        c = spec.P.linear_shift()
        values = s.window(x_start + c + 1, x_start + c + width - 1 + N_max)
        prefix = np.concatenate(([0j], np.cumsum(values)))
        i = np.arange(width)
        for N in N_values:
            yield int(N), (prefix[i + N] - prefix[i]) / N
        return

    if spec.kind == 'bilinear' and g is None:
        raise PreconditionError("Bilinear signal averages need a second signal g")
    ns = spec.index_terms(N_max, table)
    counts = spec.counts(N_values, table)
    first = poly_values(spec.P, ns)
    second = poly_values(spec.Q, ns) if spec.kind == 'bilinear' else None
    coefficients = spec.coefficients(ns)
    xs = np.arange(x_start, x_start + width, dtype=np.int64)

    def summands(lo, hi):
        rows = s.take(xs[None, :] + first[lo:hi, None])
        if second is not None:
            rows = rows * g.take(xs[None, :] + second[lo:hi, None])
        if coefficients is not None:
            rows = rows * coefficients[lo:hi, None]
        return rows

    logging.debug(f"Streaming {N_values.size} average rows over {ns.size} terms and width {width}")
    yield from _stream(ns.size, summands, counts, counts.astype(np.float64), N_values, width)


class SignalAverage(Node):
    """
    A_N s as a Signal over its support window.
    Input: Signal; Output: Signal
    """

    def __init__(self, N: int, spec: Optional[AverageSpec] = None, table: Optional[PrimeTable] = None,
                 name: str = None):
        super().__init__(name or "SignalAverage")
        self.N = N
        self.spec = spec or AverageSpec()
        self.table = table

    def __call__(self, s: Signal) -> Signal:
        x_start, width = signal_window(s, self.spec, self.N, table=self.table)
        if width == 0:
            return Signal.zeros(0, x_start)
        (_, row), = iter_signal_rows(s, self.spec, x_start, width, [self.N], table=self.table)
        return Signal(x_start, row)
