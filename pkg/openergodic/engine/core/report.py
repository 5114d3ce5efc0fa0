"""
InequalityReport - measured sides of one inequality plus its verdict.

The verdict is lhs <= rhs evaluated at full precision; any slack a check needs
(quadrature tolerance, say) must already be folded into rhs. A check whose
numbers are only meaningful under a side condition (a truncated sup that has
stabilized, say) passes that condition as `holds`; the verdict then also
requires it.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable

from openergodic.utils.serialization import convert_to_serializable


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    constant_used: float = 1.0
    params: Dict[str, Any] = field(default_factory=dict)
    holds: bool = True
    margin: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        lhs, rhs = float(self.lhs), float(self.rhs)
        object.__setattr__(self, 'lhs', lhs)
        object.__setattr__(self, 'rhs', rhs)
        object.__setattr__(self, 'constant_used', float(self.constant_used))
        object.__setattr__(self, 'holds', bool(self.holds))
        object.__setattr__(self, 'margin', rhs - lhs)
        # NaN on either side compares False
        object.__setattr__(self, 'passed', bool(lhs <= rhs) and self.holds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'lhs': _finite_or_str(self.lhs),
            'rhs': _finite_or_str(self.rhs),
            'constant_used': _finite_or_str(self.constant_used),
            'margin': _finite_or_str(self.margin),
            'pass': self.passed,
            'params': convert_to_serializable(self.params),
        }


def _finite_or_str(value: float):
    # JSON has no inf/nan literals
    return value if math.isfinite(value) else str(value)


def worst(name: str, reports: Iterable[InequalityReport], **params) -> InequalityReport:
    """
    Collapse an ensemble of reports into the one with the smallest margin.
    The count of violations and trials is recorded in params.
    """
    reports = list(reports)
    if not reports:
        return InequalityReport(name, 0.0, 0.0, params={'trials': 0, 'violations': 0, **params})
    violations = sum(not r.passed for r in reports)
    # failed side conditions first, then NaN margins, so neither is hidden
    critical = min(reports, key=lambda r: (r.holds, not math.isnan(r.margin), r.margin))
    merged = {'trials': len(reports), 'violations': violations, 'worst': critical.name, **params}
    return InequalityReport(name, critical.lhs, critical.rhs, critical.constant_used, params=merged,
                            holds=all(r.holds for r in reports))
