"""
Fourier-side objects: Dirichlet averages, lacunary kernel tails, periodograms
and the bilinear Fourier identity.

D_N(theta) = (1/N) sum_{n=1}^N exp(i n theta) is compared with the closed
indicator of [-pi/N, pi/N]; K_N = D_N - indicator.

Author: openergodic contributors
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.core.report import InequalityReport, worst
from openergodic.engine.flux.base import Node
from openergodic.processing.arith import LacunarySet, lacunary
from openergodic.processing.signal_core import Signal, TorusGrid, dft, dft_at, modulate, norm
from openergodic.utils.errors import DomainError, PreconditionError

# below this |N theta| the sin ratio loses digits; use its Taylor series
SERIES_THRESHOLD = 1e-4


# ===================== DIRICHLET KERNELS =====================

@dataclass(frozen=True)
class KernelEval:
    N: int
    theta: float
    dirichlet: complex
    indicator: int
    difference: complex


def _amplitude(N: int, thetas: np.ndarray) -> np.ndarray:
    """sin(N theta / 2) / (N sin(theta / 2)), real and even in theta."""
    amplitude = np.ones_like(thetas)
    small = np.abs(N * thetas) < SERIES_THRESHOLD
    if np.any(small):
        t = thetas[small]
        amplitude[small] = 1.0 - (N * N - 1.0) * t * t / 24.0
    large = ~small
    if np.any(large):
        t = thetas[large]
        amplitude[large] = np.sin(N * t / 2.0) / (N * np.sin(t / 2.0))
    # at theta = +-pi, sin(N pi / 2) is exactly 0 or +-1
    edge = np.abs(thetas) == math.pi
    if np.any(edge):
        amplitude[edge] = 0.0 if N % 2 == 0 else (-1.0) ** ((N - 1) // 2) / N
    return amplitude


def dirichlet_values(N: int, thetas) -> np.ndarray:
    """D_N on an array of angles in [-pi, pi)."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    thetas = np.asarray(thetas, dtype=np.float64)
    amplitude = _amplitude(N, np.atleast_1d(thetas))
    phase = (N + 1) * np.atleast_1d(thetas) / 2.0
    values = amplitude * (np.cos(phase) + 1j * np.sin(phase))
    values[np.atleast_1d(thetas) == 0] = 1.0
    return values.reshape(thetas.shape)


def dirichlet_avg(N: int, theta: float) -> complex:
    """
    (1/N) sum_{n=1}^N exp(i n theta) in closed form.
    :param N: int >= 1
    :param theta: float
    :return: complex, exactly 1 at theta = 0
    """
    return complex(dirichlet_values(N, np.array([theta]))[0])


def indicator_values(N: int, thetas) -> np.ndarray:
    """1 on the closed interval [-pi/N, pi/N]."""
    return (np.abs(np.asarray(thetas, dtype=np.float64)) <= math.pi / N).astype(np.float64)


def kernel(N: int, theta: float) -> KernelEval:
    dirichlet = dirichlet_avg(N, theta)
    indicator = int(abs(theta) <= math.pi / N)
    return KernelEval(N=N, theta=theta, dirichlet=dirichlet, indicator=indicator,
                      difference=dirichlet - indicator)


def _kernel_sq(N: int, thetas: np.ndarray) -> np.ndarray:
    """|K_N|^2 = A^2 - 2 A cos((N+1) theta / 2) 1 + 1, with A the real amplitude."""
    amplitude = _amplitude(N, thetas)
    inside = indicator_values(N, thetas)
    real_part = amplitude * np.cos((N + 1) * thetas / 2.0)
    values = amplitude * amplitude - 2.0 * real_part * inside + inside
    values[thetas == 0] = 0.0
    return values


def _members(rho: float, N_ceiling: int) -> LacunarySet:
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    return lacunary(rho, N_ceiling)


def kernel_tail_values(thetas, rho: float, N_ceiling: int) -> np.ndarray:
    """sum_{N in S_rho, N <= N_ceiling} |K_N(theta)|^2 on an array of angles, summed in ascending N."""
    thetas = np.asarray(thetas, dtype=np.float64)
    total = np.zeros(thetas.shape)
    for N in _members(rho, N_ceiling):
        total += _kernel_sq(N, thetas)
    return total


def kernel_tail_sum(theta: float, rho: float, N_ceiling: int) -> float:
    """
    sum_{N in S_rho, N <= N_ceiling} |K_N(theta)|^2.
    :param theta: float, folded into [-pi, pi]; pi and -pi are the same point
    :param rho: float > 1
    :param N_ceiling: int
    :return: float, exactly 0 at theta = 0
    """
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta}")
    if not -math.pi <= theta <= math.pi:
        theta = math.remainder(theta, 2.0 * math.pi)
    return float(kernel_tail_values(np.array([theta]), rho, N_ceiling)[0])


def kernel_sup_values(thetas, rho: float, N_ceiling: int) -> np.ndarray:
    """sup_{N in S_rho} |K_N(theta)|^2, the pointwise-sup form bounded by the tail sum."""
    thetas = np.asarray(thetas, dtype=np.float64)
    best = np.zeros(thetas.shape)
    for N in _members(rho, N_ceiling):
        np.maximum(best, _kernel_sq(N, thetas), out=best)
    return best


def tail_envelope(rho: float) -> float:
    """4 / (rho^2 - 1) + 2, an upper envelope for sup_theta of the tail sum (checked at rho = 2)."""
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    return 4.0 / (rho * rho - 1.0) + 2.0


@dataclass(frozen=True, eq=False)
class KernelTailSweep:
    """Tail sums over a grid with the derived statistics."""
    rho: float
    N_ceiling: int
    grid: TorusGrid

    @property
    def sup(self) -> float:
        return float(np.max(self.grid.samples))

    @property
    def argmax(self) -> float:
        return float(self.grid.nodes[int(np.argmax(self.grid.samples))])

    def evenness_residual(self) -> float:
        """max |S(theta_j) - S(theta_{M-j})|; nodes j and M - j are exact negatives."""
        samples = self.grid.samples
        return float(np.max(np.abs(samples[1:] - samples[:0:-1]))) if samples.size > 1 else 0.0


class KernelTail(Node):
    """
    Tail sums of the lacunary kernel over every node of a grid.
    Input: TorusGrid; Output: KernelTailSweep
    """

    def __init__(self, rho: float, N_ceiling: int, name: str = None):
        super().__init__(name or f"KernelTail(rho={rho})")
        self.rho = rho
        self.N_ceiling = N_ceiling

    def __call__(self, grid: TorusGrid) -> KernelTailSweep:
        values = kernel_tail_values(grid.nodes, self.rho, self.N_ceiling)
        logging.debug(f"Kernel tail rho={self.rho}: sup {values.max():.6g} over {grid.size} nodes")
        return KernelTailSweep(self.rho, self.N_ceiling, grid.with_samples(values))


def sin_halfangle_bound_check(x: float) -> InequalityReport:
    """x / pi <= sin(x / 2) for 0 < x < pi."""
    if not 0 < x < math.pi:
        raise DomainError(f"x must lie in (0, pi), got {x}")
    return InequalityReport('sin_halfangle', x / math.pi, math.sin(x / 2.0), 1.0, params={'x': x})


def sin_halfangle_sweep(points: int = 100_000) -> InequalityReport:
    """The half-angle bound on a dense interior grid, collapsed to the tightest point."""
    xs = math.pi * (np.arange(1, points + 1) / (points + 1))
    return worst('sin_halfangle_sweep', (sin_halfangle_bound_check(float(x)) for x in xs), points=points)


# ===================== SPECTRAL MEASURES =====================

@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    """
    Periodogram sigma_N on a grid and the correlations it reproduces.
    correlations[k + k_max] = (1/N) sum s(n + k) conj(s(n)) over the N samples;
    herglotz[k + k_max] is the quadrature of exp(-i k theta) sigma_N.
    """
    grid: TorusGrid
    N: int
    k_max: int
    correlations: np.ndarray
    herglotz: np.ndarray
    energy: float

    @property
    def mass(self) -> float:
        return float(np.real(self.grid.quadrature()))

    def correlation(self, k: int) -> complex:
        return complex(self.correlations[k + self.k_max])

    def herglotz_residual(self) -> float:
        """max_k |herglotz(k) - F(k)| / max(1, energy)."""
        if self.correlations.size == 0:
            return 0.0
        return float(np.max(np.abs(self.herglotz - self.correlations)) / max(1.0, self.energy))


def periodogram(s: Signal, N: int, grid: TorusGrid, k_max: Optional[int] = None) -> SpectralEstimate:
    """
    sigma_N(theta) = (1/2pi) |(1/sqrt N) sum s(n) exp(i n theta)|^2 over the first N samples.
    :param s: Signal, its first N stored samples are used
    :param N: int, 1 <= N <= len(s)
    :param grid: TorusGrid of size >= 2N
    :param k_max: int, correlation lags reported (default min(N - 1, 32))
    :return: SpectralEstimate
    """
    if not 1 <= N <= len(s):
        raise PreconditionError(f"Periodogram needs 1 <= N <= {len(s)} available samples, got {N}")
    if grid.size < 2 * N:
        raise PreconditionError(f"Grid of size {grid.size} is too small for N = {N}; need at least {2 * N}")
    k_max = min(N - 1, 32) if k_max is None else k_max
    if not 0 <= k_max < N:
        raise DomainError(f"k_max must lie in [0, N), got {k_max}")

    samples = s.values[:N]
    head = Signal(s.offset, samples)
    # sum s(n) exp(i n theta) = conj(dft(conj s)(theta))
    transform = dft(head.conj(), grid).samples
    sigma = np.abs(transform) ** 2 / (2.0 * math.pi * N)
    estimate_grid = grid.with_samples(sigma)

    lags = np.arange(-k_max, k_max + 1)
    correlations = np.array([np.vdot(samples[:N - k], samples[k:]) / N if k >= 0 else
                             np.conj(np.vdot(samples[:N + k], samples[-k:])) / N for k in lags])
    nodes = grid.nodes
    herglotz = np.array([estimate_grid.quadrature(np.exp(-1j * k * nodes) * sigma) for k in lags])
    energy = float(np.vdot(samples, samples).real / N)
    return SpectralEstimate(grid=estimate_grid, N=N, k_max=k_max, correlations=correlations,
                            herglotz=herglotz, energy=energy)


def orbit_periodogram(sys: FiniteSystem, f: Observable, x: int, N: int, grid: TorusGrid,
                      k_max: Optional[int] = None) -> SpectralEstimate:
    """Periodogram of the forward orbit samples f(T^n x), n = 1..N."""
    sys.check_point(x)
    samples = f.values[sys.orbit_points(x, np.arange(1, N + 1))]
    return periodogram(Signal(1, samples), N, grid, k_max)


# ===================== BILINEAR FOURIER IDENTITY =====================

def bourgain_identity_check(f: Signal, g: Signal, x: int, N: int, grid: TorusGrid,
                            tol: float = 1e-8) -> InequalityReport:
    """
    (1/N) sum_{n=1}^N f(x+n) g(x-n)
        = (1/2pi) int f_hat(theta) ((1/N) sum_{n=1}^N g(x-n) exp(-i(x-n)theta)) exp(2ix theta) dtheta.
    The integral is the rectangle rule on the grid, exact once M exceeds every frequency involved.
    The report passes when |lhs - rhs| <= tol (1 + |lhs|).
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    reach = max(abs(f.offset), abs(f.last)) if len(f) else 0
    required = 2 * (reach + N + abs(x)) + 1
    if grid.size < required:
        raise PreconditionError(f"Grid of size {grid.size} cannot resolve the identity; need at least {required}")

    ns = np.arange(1, N + 1)
    direct = complex(np.sum(f.take(x + ns) * g.take(x - ns)) / N)

    f_hat = dft(f, grid, strict=False).samples
    window = Signal(x - N, g.window(x - N, x - 1))
    g_hat = dft(window, grid, strict=False).samples / N
    integrand = f_hat * g_hat * np.exp(2j * x * grid.nodes)
    fourier = complex(grid.quadrature(integrand) / (2.0 * math.pi))

    residual = abs(direct - fourier)
    params = {'x': x, 'N': N, 'grid_size': grid.size, 'direct': direct, 'fourier': fourier}
    return InequalityReport('bourgain_identity', residual, tol * (1.0 + abs(direct)), tol, params=params)


def modulation_shift_check(s: Signal, theta: float, phis, tol: float = 1e-9) -> InequalityReport:
    """dft(modulate(s, theta))(phi) = dft(s)(phi - theta), at the given angles."""
    phis = np.asarray(phis, dtype=np.float64)
    lhs = dft_at(modulate(s, theta), phis)
    rhs = dft_at(s, phis - theta)
    residual = float(np.max(np.abs(lhs - rhs))) if phis.size else 0.0
    return InequalityReport('modulation_shift', residual, tol * max(1.0, norm(s, 1)), tol,
                            params={'theta': theta})
