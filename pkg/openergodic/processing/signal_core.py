"""
Finitely supported signals on the integers and their Fourier side.

A Signal is stored dense over one contiguous window [offset, offset + len - 1];
every index outside that window reads zero. TorusGrid holds samples on the
equispaced nodes theta_j = -pi + 2*pi*j/M of [-pi, pi).

Author: openergodic contributors
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from openergodic.processing.proc_helper import lp_norm, next_power_of_two
from openergodic.utils.errors import PreconditionError


@dataclass(frozen=True, eq=False)
class Signal:
    """Complex samples s(offset), s(offset + 1), ...; zero elsewhere."""
    offset: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128).ravel()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'offset', int(self.offset))

    @classmethod
    def from_values(cls, values, offset: int = 0) -> "Signal":
        return cls(offset=offset, values=values)

    @classmethod
    def delta(cls, k: int = 0, value: complex = 1.0) -> "Signal":
        return cls(offset=k, values=[value])

    @classmethod
    def zeros(cls, length: int = 0, offset: int = 0) -> "Signal":
        return cls(offset=offset, values=np.zeros(length, dtype=np.complex128))

    def __len__(self) -> int:
        return self.values.size

    @property
    def last(self) -> int:
        """Index of the last stored sample (offset - 1 for an empty signal)."""
        return self.offset + self.values.size - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def at(self, n: int) -> complex:
        k = n - self.offset
        if 0 <= k < self.values.size:
            return complex(self.values[k])
        return 0j

    def window(self, start: int, stop: int) -> np.ndarray:
        """Samples s(start), ..., s(stop) inclusive, zero-filled outside the support."""
        out = np.zeros(max(stop - start + 1, 0), dtype=np.complex128)
        lo, hi = max(start, self.offset), min(stop, self.last)
        if lo <= hi:
            out[lo - start:hi - start + 1] = self.values[lo - self.offset:hi - self.offset + 1]
        return out

    def take(self, indices) -> np.ndarray:
        """Samples at arbitrary integer indices (any shape)."""
        indices = np.asarray(indices, dtype=np.int64)
        pos = indices - self.offset
        inside = (pos >= 0) & (pos < self.values.size)
        out = np.zeros(indices.shape, dtype=np.complex128)
        out[inside] = self.values[pos[inside]]
        return out

    def conj(self) -> "Signal":
        return Signal(self.offset, np.conj(self.values))

    def equals(self, other: "Signal", atol: float = 0.0) -> bool:
        """Pointwise comparison over the union of both supports."""
        if len(self) == 0:
            return bool(np.all(np.abs(other.values) <= atol))
        if len(other) == 0:
            return bool(np.all(np.abs(self.values) <= atol))
        start, stop = min(self.offset, other.offset), max(self.last, other.last)
        return bool(np.all(np.abs(self.window(start, stop) - other.window(start, stop)) <= atol))

    def __repr__(self):
        return f"Signal(offset={self.offset}, len={len(self)})"


@dataclass(frozen=True, eq=False)
class TorusGrid:
    """M equispaced nodes on [-pi, pi) with optional per-node samples."""
    size: int
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.size < 1:
            raise PreconditionError(f"Grid size must be positive, got {self.size}")
        if self.samples is not None:
            samples = np.asarray(self.samples)
            if samples.shape != (self.size,):
                raise PreconditionError(f"Expected {self.size} samples, got shape {samples.shape}")
            object.__setattr__(self, 'samples', samples)

    @property
    def nodes(self) -> np.ndarray:
        # pi (2j - M) / M: nodes j and M - j are exact negatives of each other
        return math.pi * (2.0 * np.arange(self.size) - self.size) / self.size

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.size

    def with_samples(self, samples) -> "TorusGrid":
        return TorusGrid(self.size, np.asarray(samples))

    def quadrature(self, values=None) -> complex:
        """
        Rectangle rule (2*pi/M) * sum of samples over the nodes.
        Exact for trigonometric polynomials of degree < M.
        """
        values = self.samples if values is None else np.asarray(values)
        if values is None:
            raise PreconditionError("Grid carries no samples to integrate")
        total = math.fsum(np.real(values)) + 1j * math.fsum(np.imag(values)) \
            if np.iscomplexobj(values) else math.fsum(values)
        return self.spacing * total


def random_signal(rng: np.random.Generator, length: int, offset: int = 0, complex_values: bool = True) -> Signal:
    values = rng.standard_normal(length)
    if complex_values:
        values = values + 1j * rng.standard_normal(length)
    return Signal(offset, values)


# ===================== OPERATIONS =====================

def norm(s: Signal, r: float) -> float:
    """
    l^r norm of a signal.
    :param s: Signal
    :param r: float, r >= 1 or math.inf
    :return: float
    """
    return lp_norm(s.values, r)


def shift(s: Signal, k: int) -> Signal:
    """(shift s)(n) = s(n - k)."""
    return Signal(s.offset + int(k), s.values)


def modulate(s: Signal, theta: float) -> Signal:
    """(modulate s)(n) = s(n) * exp(i n theta)."""
    if theta == 0:
        return s
    n = np.arange(s.offset, s.offset + len(s), dtype=np.float64)
    return Signal(s.offset, s.values * np.exp(1j * n * theta))


def dft(s: Signal, grid: TorusGrid, strict: bool = True) -> TorusGrid:
    """
    Sample s_hat(theta) = sum_n s(n) exp(-i n theta) on the grid nodes.
    :param s: Signal
    :param grid: TorusGrid, its size M must be >= 2 * len(s) when strict
    :param strict: bool, enforce the Parseval-exact grid size
    :return: TorusGrid carrying the transform samples
    """
    size = grid.size
    if strict and size < 2 * len(s):
        raise PreconditionError(f"Grid of size {size} is too small for a support of length {len(s)}; "
                                f"need at least {2 * len(s)}")
    if len(s) == 0:
        return grid.with_samples(np.zeros(size, dtype=np.complex128))

    # theta_j = -pi + 2 pi j / M splits into an alternating sign and a plain DFT
    alternating = np.where(np.arange(len(s)) % 2 == 0, 1.0, -1.0)
    folded = s.values * alternating
    if folded.size > size:
        padded = np.zeros(-(-folded.size // size) * size, dtype=np.complex128)
        padded[:folded.size] = folded
        folded = padded.reshape(-1, size).sum(axis=0)
    spectrum = sp_fft.fft(folded, n=size)

    j = np.arange(size, dtype=np.int64)
    phase_index = ((s.offset % size) * j) % size
    phase = np.exp(-2j * math.pi * phase_index / size)
    sign = 1.0 if s.offset % 2 == 0 else -1.0
    return grid.with_samples(sign * phase * spectrum)


def dft_at(s: Signal, thetas) -> np.ndarray:
    """Direct evaluation of s_hat at arbitrary angles."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    n = np.arange(s.offset, s.offset + len(s), dtype=np.float64)
    return np.exp(-1j * np.outer(thetas, n)) @ s.values


def convolve(a: Signal, b: Signal) -> Signal:
    """
    Exact linear convolution (a * b)(j) = sum_x a(x) b(j - x).
    Computed with a zero-padded power-of-two FFT.
    """
    offset = a.offset + b.offset
    if len(a) == 0 or len(b) == 0:
        return Signal.zeros(0, offset)
    length = len(a) + len(b) - 1
    n_fft = next_power_of_two(length)
    spectrum = sp_fft.fft(a.values, n=n_fft) * sp_fft.fft(b.values, n=n_fft)
    return Signal(offset, sp_fft.ifft(spectrum)[:length])


def parseval_residual(s: Signal, grid: TorusGrid) -> float:
    """| (1/2pi) * quadrature(|s_hat|^2) - ||s||_2^2 |."""
    transform = dft(s, grid)
    energy = grid.quadrature(np.abs(transform.samples) ** 2) / (2.0 * math.pi)
    return abs(float(np.real(energy)) - norm(s, 2) ** 2)
