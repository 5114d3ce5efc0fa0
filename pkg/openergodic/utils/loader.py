"""
Loading finite systems from spec strings and CSV files.

Spec strings: cyclic:m[:step], identity:m, random:m[:seed], csv:path.
A CSV system has one row per point with columns point, map, f_re and optionally f_im.

Author: openergodic contributors
"""

import logging
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.utils.errors import DomainError

CSV_COLUMNS = ('point', 'map', 'f_re')


def load_system(path: str, delimiter: str = ',') -> Tuple[FiniteSystem, Optional[Observable]]:
    """
    Read a permutation and an optional observable from CSV.
    :param path: str, CSV file with a header row
    :param delimiter: str
    :return: (FiniteSystem, Observable or None when f_re is absent)
    """
    df = pd.read_csv(path, delimiter=delimiter)
    missing = [c for c in CSV_COLUMNS[:2] if c not in df.columns]
    if missing:
        raise DomainError(f"System CSV {path} lacks columns {missing}")
    df = df.sort_values('point')
    points = df['point'].to_numpy(dtype=np.int64)
    if not np.array_equal(points, np.arange(points.size)):
        raise DomainError(f"System CSV {path} must list points 0..{points.size - 1} exactly once")
    system = FiniteSystem(df['map'].to_numpy(dtype=np.int64))

    observable = None
    if 'f_re' in df.columns:
        values = df['f_re'].to_numpy(dtype=np.float64)
        if 'f_im' in df.columns:
            values = values + 1j * df['f_im'].to_numpy(dtype=np.float64)
        observable = Observable(values)
    logging.info(f"Loaded system with {system.size} points from {path}")
    return system, observable


def parse_system(text: str, seed: int = 0) -> Tuple[FiniteSystem, Optional[Observable]]:
    """
    Build a system from a spec string; only csv: systems carry an observable.
    :param seed: int, used by random: when the spec gives none
    """
    kind, _, rest = text.partition(':')
    fields = rest.split(':') if rest else []
    try:
        if kind == 'csv':
            if not rest:
                raise DomainError("csv: system needs a path")
            return load_system(rest)
        if not fields:
            raise DomainError(f"System spec {text!r} needs a size")
        m = int(fields[0])
        if kind == 'cyclic':
            step = int(fields[1]) if len(fields) > 1 else 1
            return FiniteSystem.cyclic(m, step), None
        if kind == 'identity':
            return FiniteSystem.identity(m), None
        if kind == 'random':
            system_seed = int(fields[1]) if len(fields) > 1 else seed
            return FiniteSystem.random(m, system_seed), None
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"Bad system spec {text!r}: {e}") from e
    raise DomainError(f"Unknown system kind {kind!r}; expected cyclic, identity, random or csv")
