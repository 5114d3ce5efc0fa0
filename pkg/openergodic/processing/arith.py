"""
Integer-valued polynomials, prime tables and lacunary index sets.

Polynomials live in the binomial basis P(n) = sum_j c_j * C(n, j), which is
exactly the set of polynomials mapping the integers to the integers.

Author: openergodic contributors
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
import yaml

from openergodic.utils.errors import DomainError, RangeError

INT64_LIMIT = 2 ** 63
# vectorised evaluation only when every intermediate stays below this
_SAFE_BOUND = 2 ** 62


# ===================== POLYNOMIALS =====================

@dataclass(frozen=True)
class IntPolynomial:
    """P(n) = sum_j coeffs[j] * C(n, j)."""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        # strip trailing zeros so degree is well defined
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, 'coeffs', coeffs or (0,))

    @classmethod
    def identity(cls) -> "IntPolynomial":
        return cls((0, 1))

    @classmethod
    def linear(cls, a: int, b: int = 0) -> "IntPolynomial":
        """a*n + b."""
        return cls((b, a))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def linear_shift(self) -> Optional[int]:
        """c when P(n) = n + c, else None."""
        if self.degree == 1 and self.coeffs[1] == 1:
            return self.coeffs[0]
        return None

    def __call__(self, n: int) -> int:
        return poly_eval(self, n)

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __str__(self):
        return "binom:[" + ",".join(str(c) for c in self.coeffs) + "]"


def _binomial(n: int, j: int) -> int:
    """Generalised C(n, j) = n (n-1) ... (n-j+1) / j!, valid for negative n."""
    value = 1
    for i in range(1, j + 1):
        value = value * (n - i + 1) // i
    return value


def poly_eval(P: IntPolynomial, n: int) -> int:
    """
    Exact value of P at an integer.
    :param P: IntPolynomial
    :param n: int
    :return: int, guaranteed to fit a signed 64-bit word
    """
    n = int(n)
    value, binom = 0, 1
    for j, c in enumerate(P.coeffs):
        if j > 0:
            binom = binom * (n - j + 1) // j
        value += c * binom
    if abs(value) >= INT64_LIMIT:
        raise RangeError(f"{P}({n}) = {value} overflows a signed 64-bit integer")
    return value


def _vectorisable(P: IntPolynomial, bound: int) -> bool:
    total = 0
    for j, c in enumerate(P.coeffs):
        binom_bound = math.comb(bound + j, j)
        if binom_bound * (bound + j + 1) >= _SAFE_BOUND:
            return False
        total += abs(c) * binom_bound
    return total < _SAFE_BOUND


def poly_values(P: IntPolynomial, ns) -> np.ndarray:
    """
    Evaluate P on an integer array, int64 result.
    Falls back to exact Python integers when int64 intermediates could overflow,
    raising RangeError if a value itself does not fit.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(ns.shape, dtype=np.int64)
    bound = int(np.abs(ns).max())
    if _vectorisable(P, bound):
        values = np.full(ns.shape, P.coeffs[0], dtype=np.int64)
        binom = np.ones(ns.shape, dtype=np.int64)
        for j, c in enumerate(P.coeffs[1:], start=1):
            binom = binom * (ns - j + 1) // j
            if c:
                values += c * binom
        return values
    logging.debug(f"Evaluating {P} with exact integers up to |n| = {bound}")
    flat = [poly_eval(P, n) for n in ns.ravel().tolist()]
    return np.array(flat, dtype=np.int64).reshape(ns.shape)


def from_monomial(a: Sequence[int]) -> IntPolynomial:
    """
    Convert sum_i a_i n^i to the binomial basis.
    The binomial coefficients are the forward differences of P at 0.
    """
    a = [int(v) for v in a] or [0]
    degree = len(a) - 1
    samples = [sum(c * i ** k for k, c in enumerate(a)) for i in range(degree + 1)]
    coeffs = []
    for j in range(degree + 1):
        coeffs.append(samples[0])
        samples = [samples[i + 1] - samples[i] for i in range(len(samples) - 1)]
    return IntPolynomial(tuple(coeffs))


def parse_polynomial(text: str) -> IntPolynomial:
    """
    Parse 'binom:[c0,c1,...]' or 'mono:[a0,a1,...]'.
    :param text: str
    :return: IntPolynomial
    """
    kind, sep, body = text.partition(':')
    if not sep or kind not in ('binom', 'mono'):
        raise DomainError(f"Polynomial must look like 'binom:[...]' or 'mono:[...]', got {text!r}")
    try:
        coeffs = yaml.safe_load(body)
    except yaml.YAMLError as e:
        raise DomainError(f"Cannot parse coefficients in {text!r}: {e}") from e
    if not isinstance(coeffs, list) or not coeffs or not all(isinstance(c, int) and not isinstance(c, bool)
                                                             for c in coeffs):
        raise DomainError(f"Coefficients must be a non-empty list of integers, got {body!r}")
    return IntPolynomial(tuple(coeffs)) if kind == 'binom' else from_monomial(coeffs)


# ===================== PRIMES =====================

@dataclass(frozen=True, eq=False)
class PrimeTable:
    ceiling: int
    primes: np.ndarray
    pi: np.ndarray

    def count(self, N: int) -> int:
        """pi_N, the number of primes <= N."""
        if N > self.ceiling:
            raise DomainError(f"N = {N} exceeds the table ceiling {self.ceiling}")
        return int(self.pi[N]) if N >= 0 else 0

    def upto(self, N: int) -> np.ndarray:
        return self.primes[:self.count(N)]


def sieve(ceiling: int) -> PrimeTable:
    """
    Sieve of Eratosthenes over [0, ceiling].
    :param ceiling: int >= 2
    :return: PrimeTable
    """
    if ceiling < 2:
        raise DomainError(f"Sieve ceiling must be >= 2, got {ceiling}")
    is_prime = np.ones(ceiling + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(ceiling) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    pi = np.cumsum(is_prime, dtype=np.int64)
    for array in (primes, pi):
        array.setflags(write=False)
    logging.debug(f"Sieved {primes.size} primes up to {ceiling}")
    return PrimeTable(ceiling=ceiling, primes=primes, pi=pi)


# ===================== LACUNARY SETS =====================

@dataclass(frozen=True, eq=False)
class LacunarySet:
    """Distinct values floor(rho^m), m >= 1, not exceeding the ceiling."""
    rho: float
    ceiling: int
    members: np.ndarray

    def __iter__(self) -> Iterator[int]:
        return iter(int(m) for m in self.members)

    def __len__(self) -> int:
        return self.members.size

    def __contains__(self, N: int) -> bool:
        k = np.searchsorted(self.members, N)
        return bool(k < self.members.size and self.members[k] == N)

    @property
    def ratio_bound(self) -> float:
        """Consecutive members never differ by more than this factor."""
        return 2.0 * self.rho

    def between(self, lo: int, hi: int) -> np.ndarray:
        """Members N with lo <= N <= hi."""
        return self.members[(self.members >= lo) & (self.members <= hi)]

    def mask(self, N_max: int) -> np.ndarray:
        """Boolean array over N = 1..N_max flagging members."""
        flags = np.zeros(N_max, dtype=bool)
        inside = self.members[self.members <= N_max]
        flags[inside - 1] = True
        return flags


def _floor_power(rho: float, m: int) -> int:
    value = rho ** m
    nearest = round(value)
    if abs(value - nearest) <= max(1e-9, 4 * np.finfo(float).eps * value):
        exact = Fraction(rho) ** m
        return exact.numerator // exact.denominator
    return math.floor(value)


def lacunary(rho: float, ceiling: int) -> LacunarySet:
    """
    S_rho truncated at the ceiling.
    :param rho: float > 1
    :param ceiling: int
    :return: LacunarySet
    """
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    members = []
    m = 1
    while True:
        value = _floor_power(rho, m)
        if value > ceiling:
            break
        if not members or value > members[-1]:
            members.append(value)
        m += 1
    array = np.array(members, dtype=np.int64)
    array.setflags(write=False)
    return LacunarySet(rho=float(rho), ceiling=int(ceiling), members=array)
