import math

import numpy as np

from openergodic.utils.errors import DomainError


def next_power_of_two(length: int) -> int:
    """Smallest power of two >= length (1 for length <= 1)."""
    if length <= 1:
        return 1
    return 2 ** (length - 1).bit_length()


def check_order(r: float) -> float:
    """
    Validate an l^r exponent.
    :param r: float, r >= 1 or math.inf
    :return: float, the exponent
    """
    r = float(r)
    if math.isnan(r) or r < 1:
        raise DomainError(f"Norm exponent must satisfy r >= 1 or r = inf, got {r}")
    return r


def lp_norm(values: np.ndarray, r: float, weight: float = 1.0) -> float:
    """
    (weight * sum |v|^r)^(1/r), or max |v| for r = inf.
    weight = 1/m gives the L^r norm against the uniform measure on m points.
    """
    r = check_order(r)
    magnitudes = np.abs(np.asarray(values))
    if magnitudes.size == 0:
        return 0.0
    if math.isinf(r):
        return float(magnitudes.max())
    if r == 1.0:
        return float(weight * magnitudes.sum())
    if r == 2.0:
        return float(math.sqrt(weight * np.dot(magnitudes, magnitudes)))
    # scale first so large entries do not overflow under the power
    peak = magnitudes.max()
    if peak == 0:
        return 0.0
    return float(peak * (weight * np.sum((magnitudes / peak) ** r)) ** (1.0 / r))


def conjugate_exponent(r: float) -> float:
    """r' with 1/r + 1/r' = 1."""
    r = check_order(r)
    if r == 1.0:
        return math.inf
    if math.isinf(r):
        return 1.0
    return r / (r - 1.0)
