"""
Frozen reference values ("goldens") kept in a YAML file.

In write mode measured values are recorded; in check mode they are compared
against the stored ones and a missing file or key is an error.

Author: openergodic contributors
"""

import logging
import os
from typing import Dict, Optional

import yaml

from openergodic.engine.core.report import InequalityReport
from openergodic.utils.errors import ConfigError, GoldenMissingError

COMPARISONS = ('equal', 'upper')


class GoldenStore:
    """
    Golden values keyed by name.
    comparison 'equal' checks |value - golden| <= rtol * max(1, |golden|);
    'upper' checks value <= golden * (1 + rtol).
    """

    def __init__(self, path: str, mode: str = "off", rtol: float = 1e-9):
        self.path = path
        self.mode = mode
        self.rtol = rtol
        self.values: Dict[str, float] = {}
        self.dirty = False
        if mode != "off" and os.path.exists(path):
            with open(path, 'r') as file:
                loaded = yaml.safe_load(file) or {}
            if not isinstance(loaded, dict):
                raise ConfigError(f"Golden file {path} must hold a mapping")
            self.values = {str(k): float(v) for k, v in loaded.items()}
            logging.debug(f"Loaded {len(self.values)} golden values from {path}")

    def get(self, key: str) -> float:
        if not os.path.exists(self.path):
            raise GoldenMissingError(f"Golden file {self.path} does not exist; run with golden_mode write first")
        if key not in self.values:
            raise GoldenMissingError(f"Golden value {key!r} is missing from {self.path}")
        return self.values[key]

    def apply(self, key: str, value: float, comparison: str = 'equal') -> Optional[InequalityReport]:
        """
        Record or check one value according to the store mode.
        :return: InequalityReport in check mode, None otherwise
        """
        if comparison not in COMPARISONS:
            raise ValueError(f"Comparison must be one of {COMPARISONS}, got {comparison!r}")
        if self.mode == "write":
            self.values[key] = float(value)
            self.dirty = True
            return None
        if self.mode != "check":
            return None
        golden = self.get(key)
        params = {'key': key, 'golden': golden, 'value': float(value), 'comparison': comparison}
        if comparison == 'upper':
            return InequalityReport(f"golden:{key}", value, golden * (1.0 + self.rtol), 1.0, params=params)
        tolerance = self.rtol * max(1.0, abs(golden))
        return InequalityReport(f"golden:{key}", abs(value - golden), tolerance, 1.0, params=params)

    def save(self):
        if not self.dirty:
            return
        parent = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(parent, exist_ok=True)
        with open(self.path, 'w') as file:
            yaml.safe_dump(dict(sorted(self.values.items())), file, default_flow_style=False)
        self.dirty = False
        logging.info(f"Wrote {len(self.values)} golden values to {self.path}")
