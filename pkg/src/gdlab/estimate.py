from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Estimate:
    """A value bracketed by certified bounds.

    ``exact`` means ``lower == value == upper`` up to floating rounding; when it
    is false the value is a heuristic (usually the best found by a search) and
    ``upper - lower`` is the reported gap.
    """

    value: float
    lower: float
    upper: float
    exact: bool
    witness: Any = field(default=None, compare=False, repr=False)

    @classmethod
    def exactly(cls, value, witness=None) -> "Estimate":
        return cls(value, value, value, True, witness)

    @property
    def gap(self) -> float:
        if self.exact:
            return 0.0
        return float(self.upper) - float(self.lower)

    def as_dict(self) -> dict:
        return {
            "value": _num(self.value),
            "lower": _num(self.lower),
            "upper": _num(self.upper),
            "gap": _num(self.gap),
            "exact": self.exact,
        }

    def __float__(self) -> float:
        return float(self.value)


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)
