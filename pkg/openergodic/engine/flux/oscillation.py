"""
Oscillation seminorms over block partitions.

For cuts N_1 < ... < N_{K+1} the k-th block value is
    || sup_{N_k <= N <= N_{k+1}, N in S_rho} |A_N - A_{N_{k+1}}| ||
and the report carries the block values, their total and total / (sqrt(K) ||f||).
A block with no admissible N contributes 0.

Author: openergodic contributors
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.core.report import InequalityReport
from openergodic.engine.flux.averaging import (AverageSpec, iter_signal_rows, iter_system_rows,
                                               signal_window)
from openergodic.engine.flux.base import Node
from openergodic.processing.arith import LacunarySet, PrimeTable, lacunary
from openergodic.processing.proc_helper import lp_norm
from openergodic.processing.signal_core import Signal, norm
from openergodic.utils.config import CornerSettings
from openergodic.utils.errors import DomainError, PreconditionError


# ===================== PARTITIONS =====================

@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Cuts N_1 < N_2 < ... < N_{K+1}; lacunary restricts N inside blocks (None admits every N)."""
    cuts: np.ndarray
    lacunary: Optional[LacunarySet] = None

    def __post_init__(self):
        cuts = np.array(self.cuts, dtype=np.int64).ravel()
        if cuts.size and (cuts[0] < 1 or np.any(np.diff(cuts) <= 0)):
            raise DomainError(f"Cuts must be strictly increasing positive integers, got {cuts.tolist()}")
        cuts.setflags(write=False)
        object.__setattr__(self, 'cuts', cuts)

    @classmethod
    def empty(cls) -> "BlockPartition":
        return cls(np.zeros(0, dtype=np.int64))

    @property
    def K(self) -> int:
        return max(self.cuts.size - 1, 0)

    @property
    def separated(self) -> bool:
        """2 N_k < N_{k+1} for every k."""
        return bool(np.all(2 * self.cuts[:-1] < self.cuts[1:]))

    def blocks(self) -> List[Tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(self.cuts[:-1], self.cuts[1:])]

    def admissible(self, k: int) -> np.ndarray:
        lo, hi = int(self.cuts[k]), int(self.cuts[k + 1])
        if self.lacunary is None:
            return np.arange(lo, hi + 1, dtype=np.int64)
        return self.lacunary.between(lo, hi)

    def interior_counts(self) -> np.ndarray:
        """Admissible N strictly inside each block."""
        return np.array([np.count_nonzero((n > lo) & (n < hi)) for (lo, hi), n in
                         zip(self.blocks(), (self.admissible(k) for k in range(self.K)))], dtype=np.int64)

    def with_lacunary(self, rho: float) -> "BlockPartition":
        if self.lacunary is not None or not self.cuts.size:
            return self
        return BlockPartition(self.cuts, lacunary(rho, int(self.cuts[-1])))

    def refine(self, cut: int) -> "BlockPartition":
        """Insert one more cut."""
        if cut in set(self.cuts.tolist()):
            return self
        return BlockPartition(np.sort(np.append(self.cuts, cut)), self.lacunary)

    def prefix(self, K: int) -> "BlockPartition":
        """The first K blocks."""
        return BlockPartition(self.cuts[:K + 1], self.lacunary)


def geometric_cuts(K: int, ratio: float = 2.0, start: int = 1) -> BlockPartition:
    """
    K blocks cut at consecutive distinct members floor(ratio^m) >= start.
    Smaller K give prefixes of larger ones.
    """
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    ceiling = max(start, 2) * 4
    while True:
        members = lacunary(ratio, ceiling).members
        members = members[members >= start]
        if members.size >= K + 1:
            return BlockPartition(members[:K + 1])
        ceiling *= 4


def parse_blocks(text: str, K: int = 8) -> BlockPartition:
    """
    '2,8,32,128' or 'auto:<ratio>^geometric'.
    :param text: str
    :param K: int, block count for the automatic form
    """
    if text.startswith('auto:'):
        body = text[len('auto:'):]
        ratio, sep, tail = body.partition('^')
        if not sep or tail != 'geometric':
            raise DomainError(f"Automatic blocks must look like 'auto:<ratio>^geometric', got {text!r}")
        try:
            return geometric_cuts(K, float(ratio), start=2)
        except ValueError as e:
            raise DomainError(f"Bad ratio in {text!r}: {e}") from e
    try:
        return BlockPartition([int(v) for v in text.split(',') if v.strip()])
    except ValueError as e:
        raise DomainError(f"Cuts must be comma separated integers, got {text!r}") from e


@dataclass(frozen=True, eq=False)
class OscillationReport:
    K: int
    per_block: np.ndarray
    input_norm: float
    params: Dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(math.fsum(self.per_block))

    @property
    def ratio_sqrtK(self) -> float:
        if self.K == 0 or self.input_norm == 0:
            return 0.0
        return self.total / (math.sqrt(self.K) * self.input_norm)

    def prefix(self, K: int) -> "OscillationReport":
        """Report restricted to the first K blocks (valid when the partition prefixes agree)."""
        return OscillationReport(K, self.per_block[:K], self.input_norm, dict(self.params, K=K))

    def to_dict(self) -> Dict:
        return {'K': self.K, 'per_block': self.per_block.tolist(), 'total': self.total,
                'ratio_sqrtK': self.ratio_sqrtK}


# ===================== BLOCK SWEEPS =====================

def _block_values(rows: Iterator[Tuple[int, np.ndarray]], blocks: BlockPartition, p: float,
                  weight: float) -> np.ndarray:
    """Consume ascending (N, row) pairs and return the block norms."""
    K = blocks.K
    per_block = np.zeros(K)
    admissible = [blocks.admissible(k) for k in range(K)]
    buffer: Dict[int, np.ndarray] = {}
    k = 0
    for N, row in rows:
        buffer[N] = row
        while k < K and N == blocks.cuts[k + 1]:
            target = buffer[N]
            if admissible[k].size:
                sup = np.zeros(target.shape)
                for n in admissible[k]:
                    np.maximum(sup, np.abs(buffer[int(n)] - target), out=sup)
                per_block[k] = lp_norm(sup, p, weight=weight)
            buffer = {n: r for n, r in buffer.items() if n >= N}
            k += 1
    return per_block


def _needed(blocks: BlockPartition) -> np.ndarray:
    parts = [blocks.cuts[1:]] + [blocks.admissible(k) for k in range(blocks.K)]
    return np.unique(np.concatenate(parts)) if blocks.K else np.zeros(0, dtype=np.int64)


def oscillation_sum(s: Signal, blocks: BlockPartition, rho: float, spec: Optional[AverageSpec] = None,
                    table: Optional[PrimeTable] = None, p: float = 2.0) -> OscillationReport:
    """
    Block-wise l^p norms over Z of sup |A_N s - A_{N_{k+1}} s| for admissible N.
    :param s: Signal
    :param blocks: BlockPartition; without its own lacunary set S_rho is used
    :param rho: float > 1
    :param spec: AverageSpec of linear kind, default the plain shift average
    :return: OscillationReport
    """
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    spec = spec or AverageSpec()
    blocks = blocks.with_lacunary(rho)
    if blocks.K == 0:
        return OscillationReport(0, np.zeros(0), norm(s, p))
    if spec.index == 'primes' and blocks.cuts[0] < 2:
        raise PreconditionError("Prime-indexed oscillation needs N_1 >= 2")
    x_start, width = signal_window(s, spec, int(blocks.cuts[-1]), table=table)
    if width == 0:
        return OscillationReport(blocks.K, np.zeros(blocks.K), norm(s, p))
    rows = iter_signal_rows(s, spec, x_start, width, _needed(blocks), table=table)
    per_block = _block_values(rows, blocks, p, 1.0)
    return OscillationReport(blocks.K, per_block, norm(s, p),
                             params={'rho': rho, 'cuts': blocks.cuts.tolist(), 'p': p})


def oscillation_sum_system(sys: FiniteSystem, f: Observable, blocks: BlockPartition, rho: float,
                           variant: Optional[AverageSpec] = None, g: Optional[Observable] = None,
                           table: Optional[PrimeTable] = None, p: float = 2.0) -> OscillationReport:
    """
    Oscillation over a finite system, norms against the uniform measure.
    variant is a linear (P), bilinear (P, Q, second factor g) or prime-indexed (Q) AverageSpec,
    optionally modulated by exp(i R(n) theta).
    """
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    variant = variant or AverageSpec()
    blocks = blocks.with_lacunary(rho)
    input_norm = f.norm(p) * (g.norm(p) if variant.kind == 'bilinear' and g is not None else 1.0)
    if blocks.K == 0:
        return OscillationReport(0, np.zeros(0), input_norm)
    if variant.index == 'primes' and blocks.cuts[0] < 2:
        raise PreconditionError("Prime-indexed oscillation needs N_1 >= 2")
    rows = iter_system_rows(sys, f, variant, _needed(blocks), g=g, table=table)
    per_block = _block_values(rows, blocks, p, 1.0 / sys.size)
    return OscillationReport(blocks.K, per_block, input_norm,
                             params={'rho': rho, 'cuts': blocks.cuts.tolist(), 'p': p, 'kind': variant.kind,
                                     'index': variant.index})


class OscillationNode(Node):
    """
    Oscillation report of a signal for a fixed partition.
    Input: Signal; Output: OscillationReport
    """

    def __init__(self, blocks: BlockPartition, rho: float, spec: Optional[AverageSpec] = None, name: str = None):
        super().__init__(name or "Oscillation")
        self.blocks = blocks.with_lacunary(rho)
        self.rho = rho
        self.spec = spec

    def __call__(self, s: Signal) -> OscillationReport:
        return oscillation_sum(s, self.blocks, self.rho, self.spec)


# ===================== CORNER BLOCKS =====================

@dataclass(frozen=True, eq=False)
class CornerResult:
    partition: BlockPartition
    convergent: bool
    epsilon: float
    p: float
    alpha: float
    beta: float
    gamma: float
    block_norms: np.ndarray
    report: Optional[InequalityReport] = None

    @property
    def lower_bound(self) -> float:
        return float(np.mean(self.block_norms)) if self.block_norms.size else 0.0

    @property
    def threshold(self) -> float:
        return self.gamma ** (1.0 / self.p) * self.epsilon / 2.0


def _tail_diameter(tail: np.ndarray) -> np.ndarray:
    """max_{n, m} |a_n(x) - a_m(x)| over the rows of tail, per column."""
    if not np.iscomplexobj(tail) or not np.any(tail.imag):
        real = tail.real
        return real.max(axis=0) - real.min(axis=0)
    diameter = np.zeros(tail.shape[1])
    for row in tail:
        np.maximum(diameter, np.abs(tail - row).max(axis=0), out=diameter)
    return diameter


def corner_blocks(family: np.ndarray, epsilon: float, p: float = 1.0,
                  settings: Optional[CornerSettings] = None) -> CornerResult:
    """
    Replay the inductive block construction on a finite family of averages.

    family[N - 1, x] holds A_N(x), N = 1..ceiling, on m points of uniform mass.
    A_eps is approximated at finite scale: points whose values beyond
    tail_fraction * ceiling still spread by more than epsilon. With alpha = mu(A_eps),
    beta = beta_factor * alpha and gamma = gamma_factor * beta, N_1 = 1 and N_{k+1} is the
    least M > N_k with mu{x in A_eps : sup_{N_k <= N <= M} |A_N - A_M| > epsilon / 2} > beta.
    The construction stops when no M within the ceiling qualifies.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    settings = settings or CornerSettings()
    family = np.asarray(family)
    if family.ndim == 1:
        family = family[:, None]
    ceiling, m = family.shape
    if ceiling < 2:
        raise PreconditionError(f"Corner construction needs at least two averages, got {ceiling}")

    tail_start = min(max(int(math.ceil(ceiling * settings.tail_fraction)), 1), ceiling) - 1
    in_set = _tail_diameter(family[tail_start:]) > epsilon
    alpha = float(np.mean(in_set))
    beta = settings.beta_factor * alpha
    gamma = settings.gamma_factor * beta
    if alpha == 0:
        logging.info(f"Corner construction: no oscillation above {epsilon} within {ceiling} averages")
        return CornerResult(BlockPartition.empty(), True, epsilon, p, alpha, beta, gamma, np.zeros(0))

    cuts = [1]
    block_norms = []
    while True:
        lo = cuts[-1]
        running = np.zeros(m)
        chosen = None
        for M in range(lo + 1, ceiling + 1):
            target = family[M - 1]
            # sup over N_k <= N <= M of |A_N - A_M|, rebuilt since the target moves with M
            running = np.abs(family[lo - 1:M] - target).max(axis=0)
            if np.mean(in_set & (running > epsilon / 2.0)) > beta:
                chosen = M
                break
        if chosen is None:
            break
        cuts.append(chosen)
        block_norms.append(lp_norm(running, p, weight=1.0 / m))

    block_norms = np.array(block_norms)
    partition = BlockPartition(cuts) if len(cuts) > 1 else BlockPartition.empty()
    result = CornerResult(partition, False, epsilon, p, alpha, beta, gamma, block_norms)
    report = InequalityReport('corner_lower_bound', result.threshold, result.lower_bound, gamma,
                              params={'K': partition.K, 'alpha': alpha, 'epsilon': epsilon, 'p': p})
    logging.debug(f"Corner construction: {partition.K} blocks, lower bound {result.lower_bound:.6g}")
    return CornerResult(partition, False, epsilon, p, alpha, beta, gamma, block_norms, report)


# ===================== ETEMADI SANDWICH =====================

def etemadi_sandwich_check(sys: FiniteSystem, f: Observable, rho: float, N_max: int) -> InequalityReport:
    """
    For consecutive members N_m < N_{m+1} of S_rho and every N in between:
        (N_m / N_{m+1}) A_{N_m} f <= A_N f <= (N_{m+1} / N_m) A_{N_{m+1}} f   pointwise.
    Checked in the cross-multiplied form N S_{N_m} <= N_{m+1} S_N and N_m S_N <= N S_{N_{m+1}},
    S_N the partial sums, which nonnegativity makes monotone. lhs is the largest violation.
    """
    if not f.is_nonnegative():
        raise DomainError("Etemadi sandwich needs a nonnegative observable")
    if not rho > 1:
        raise DomainError(f"Lacunary ratio must be > 1, got {rho}")
    members = lacunary(rho, N_max).members
    points = np.arange(sys.size)
    ns = np.arange(1, N_max + 1)
    sums = np.cumsum(f.values.real[sys.orbit_points(points[None, :], ns[:, None])], axis=0)

    worst_gap = -math.inf
    violations = checked = 0
    for low, high in zip(members[:-1], members[1:]):
        Ns = np.arange(low, high + 1)
        partial = sums[Ns - 1]
        lower_gap = Ns[:, None] * sums[low - 1][None, :] - high * partial
        upper_gap = low * partial - Ns[:, None] * sums[high - 1][None, :]
        gaps = np.maximum(lower_gap, upper_gap)
        worst_gap = max(worst_gap, float(gaps.max()))
        violations += int(np.count_nonzero(gaps > 0))
        checked += gaps.size
    if checked == 0:
        worst_gap = 0.0
    return InequalityReport('etemadi_sandwich', worst_gap, 0.0, 1.0,
                            params={'rho': rho, 'N_max': N_max, 'checked': checked, 'violations': violations})
