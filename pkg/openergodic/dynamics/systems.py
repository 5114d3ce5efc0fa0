"""
Finite measure-preserving systems.

A FiniteSystem is a permutation of {0, ..., m-1} with the uniform measure.
Powers T^k are read off the cycle decomposition, so any T^k x costs O(1)
regardless of k (negative k included).

Author: openergodic contributors
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from openergodic.processing.proc_helper import lp_norm
from openergodic.processing.signal_core import Signal
from openergodic.utils.errors import DomainError


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    mapping: np.ndarray

    def __post_init__(self):
        mapping = np.array(self.mapping, dtype=np.int64).ravel()
        m = mapping.size
        if m == 0:
            raise DomainError("A finite system needs at least one point")
        if mapping.min() < 0 or mapping.max() >= m or np.unique(mapping).size != m:
            raise DomainError(f"Map is not a permutation of {{0..{m - 1}}}")
        mapping.setflags(write=False)
        object.__setattr__(self, 'mapping', mapping)
        self._decompose()

    def _decompose(self):
        m = self.mapping.size
        order = np.empty(m, dtype=np.int64)
        cycle_of = np.full(m, -1, dtype=np.int64)
        starts, lengths = [], []
        filled = 0
        for root in range(m):
            if cycle_of[root] >= 0:
                continue
            starts.append(filled)
            x = root
            while cycle_of[x] < 0:
                cycle_of[x] = len(starts) - 1
                order[filled] = x
                filled += 1
                x = self.mapping[x]
            lengths.append(filled - starts[-1])
        position = np.empty(m, dtype=np.int64)
        position[order] = np.arange(m)
        object.__setattr__(self, '_order', order)
        object.__setattr__(self, '_cycle_of', cycle_of)
        object.__setattr__(self, '_starts', np.array(starts, dtype=np.int64))
        object.__setattr__(self, '_lengths', np.array(lengths, dtype=np.int64))
        object.__setattr__(self, '_position', position)

    # ===================== CONSTRUCTORS =====================

    @classmethod
    def cyclic(cls, m: int, step: int = 1) -> "FiniteSystem":
        """x -> x + step mod m."""
        return cls((np.arange(m) + step) % m)

    @classmethod
    def identity(cls, m: int) -> "FiniteSystem":
        return cls(np.arange(m))

    @classmethod
    def random(cls, m: int, seed) -> "FiniteSystem":
        """Uniformly random permutation; seed may be an int or a numpy Generator."""
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return cls(rng.permutation(m))

    # ===================== STRUCTURE =====================

    @property
    def size(self) -> int:
        return self.mapping.size

    def check_point(self, x: int):
        if not 0 <= x < self.size:
            raise DomainError(f"Point {x} outside the system {{0..{self.size - 1}}}")

    def inverse(self) -> "FiniteSystem":
        return FiniteSystem(np.argsort(self.mapping))

    def is_ergodic(self) -> bool:
        """True when the permutation is a single cycle."""
        return self._lengths.size == 1

    def cycles(self) -> List[np.ndarray]:
        return [self._order[s:s + n] for s, n in zip(self._starts, self._lengths)]

    def period(self, x) -> np.ndarray:
        """Length of the cycle through x."""
        return self._lengths[self._cycle_of[np.asarray(x)]]

    def cycle_period_lcm(self) -> int:
        return math.lcm(*(int(n) for n in self._lengths))

    def orbit_points(self, x, ns) -> np.ndarray:
        """T^n x for broadcastable arrays x and n (n may be negative)."""
        x = np.asarray(x, dtype=np.int64)
        ns = np.asarray(ns, dtype=np.int64)
        cycle = self._cycle_of[x]
        start, length = self._starts[cycle], self._lengths[cycle]
        return self._order[start + np.mod(self._position[x] - start + ns, length)]

    def power_map(self, k: int) -> np.ndarray:
        """Array of T^k x over all points."""
        return self.orbit_points(np.arange(self.size), k)

    def cycle_average(self, f: "Observable") -> "Observable":
        """Average of f over the cycle of each point, the finite E(f | invariant sets)."""
        sums = np.bincount(self._cycle_of, weights=f.values.real, minlength=self._lengths.size) + \
            1j * np.bincount(self._cycle_of, weights=f.values.imag, minlength=self._lengths.size)
        return Observable((sums / self._lengths)[self._cycle_of])

    def __repr__(self):
        return f"FiniteSystem(size={self.size}, cycles={self._lengths.size})"


@dataclass(frozen=True, eq=False)
class Observable:
    """Complex value per point of a finite system."""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(values)):
            raise DomainError("Observable values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def constant(cls, m: int, c: complex) -> "Observable":
        return cls(np.full(m, c, dtype=np.complex128))

    @classmethod
    def indicator(cls, m: int, point: int) -> "Observable":
        values = np.zeros(m)
        values[point] = 1.0
        return cls(values)

    @classmethod
    def random(cls, m: int, rng: np.random.Generator, nonnegative: bool = False) -> "Observable":
        if nonnegative:
            return cls(rng.random(m))
        return cls(rng.standard_normal(m) + 1j * rng.standard_normal(m))

    @property
    def size(self) -> int:
        return self.values.size

    def mean(self) -> complex:
        return complex(self.values.mean())

    def norm(self, r: float) -> float:
        """L^r norm against the uniform probability measure."""
        return lp_norm(self.values, r, weight=1.0 / self.size)

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def compose(self, sys: FiniteSystem, k: int = 1) -> "Observable":
        """f o T^k."""
        return Observable(self.values[sys.power_map(k)])

    def __mul__(self, other: "Observable") -> "Observable":
        return Observable(self.values * other.values)

    def __sub__(self, other: "Observable") -> "Observable":
        return Observable(self.values - other.values)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values.imag == 0) and np.all(self.values.real >= 0))


@dataclass(frozen=True)
class RotationOrbit:
    """Samples frac(start + n * alpha), n = 0 .. length - 1, of an irrational rotation."""
    alpha: float
    start: float = 0.0
    length: int = 1

    def __post_init__(self):
        if self.length < 1:
            raise DomainError(f"Orbit length must be >= 1, got {self.length}")
        if not 0 <= self.start < 1:
            raise DomainError(f"Start point must lie in [0, 1), got {self.start}")

    def points(self) -> np.ndarray:
        n = np.arange(self.length, dtype=np.float64)
        return np.mod(self.start + n * self.alpha, 1.0)


# ===================== OPERATIONS =====================

def orbit_values(sys: FiniteSystem, f: Observable, x: int, n_max: int) -> Signal:
    """
    Two-sided truncated orbit phi_x(n) = f(T^n x), |n| <= n_max.
    :param sys: FiniteSystem
    :param f: Observable
    :param x: int, starting point
    :param n_max: int >= 0
    :return: Signal with offset -n_max
    """
    sys.check_point(x)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    ns = np.arange(-n_max, n_max + 1)
    return Signal(-n_max, f.values[sys.orbit_points(x, ns)])


def coboundary(sys: FiniteSystem, g: Observable) -> Observable:
    """h = g - g o T."""
    return g - g.compose(sys)


def invariant_split(sys: FiniteSystem, f: Observable) -> Tuple[Observable, Observable]:
    """f = E(f | I) + (f - E(f | I)); the second part averages to zero on every cycle."""
    expectation = sys.cycle_average(f)
    return expectation, f - expectation


def rotation_samples(orbit: RotationOrbit, k: int) -> Signal:
    """n -> exp(2 pi i k frac(start + n alpha)), indexed from n = 0."""
    return Signal(0, np.exp(2j * math.pi * k * orbit.points()))
