"""Numerical tolerances shared by every module.

All floating-point policy lives here; downstream code reads ``TOL`` instead of
hard-coding thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-9
    orthonormality: float = 1e-10
    residual: float = 1e-9
    lts: float = 1e-8
    commute: float = 1e-8
    root_round: int = 6
    root_match: float = 1e-6
    period: float = 1e-8

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)


TOL = Tolerances()
