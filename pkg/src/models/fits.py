"""Log-log least squares fits ``value ~ C * scale^exponent``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

ZERO_TOLERANCE = 1e-14


@dataclass(frozen=True)
class RateFit:
    exponent: float
    constant: float
    scales: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    identically_zero: bool = False

    def at_least(self, target: float, slack: float = 0.0) -> bool:
        return self.identically_zero or self.exponent >= target - slack

    def to_dict(self) -> Dict:
        return {
            "exponent": None if self.identically_zero else self.exponent,
            "constant": self.constant,
            "scales": self.scales,
            "values": self.values,
            "identically_zero": self.identically_zero,
        }


def fit_rate(
    scales: Sequence[float],
    values: Sequence[float],
    zero_tol: float = ZERO_TOLERANCE,
    weights: Optional[Sequence[float]] = None,
) -> RateFit:
    """Fit ``log|value| = exponent * log(scale) + log(constant)``.

    Values at or below ``zero_tol`` are dropped; if none remain the fit is
    flagged as identically zero. ``weights`` multiply the log residuals.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    keep = values > zero_tol
    if not keep.any():
        return RateFit(float("inf"), 0.0, scales.tolist(), values.tolist(), True)
    if keep.sum() < 2:
        return RateFit(0.0, float(values[keep][0]), scales.tolist(), values.tolist())
    w = None if weights is None else np.asarray(weights, dtype=float)[keep]
    slope, intercept = np.polyfit(np.log(scales[keep]), np.log(values[keep]), 1, w=w)
    return RateFit(float(slope), float(np.exp(intercept)), scales.tolist(), values.tolist())


def r_squared(x: Sequence[float], y: Sequence[float], design: np.ndarray = None) -> float:
    """Coefficient of determination of a linear least squares fit of ``y``."""
    y = np.asarray(y, dtype=float)
    if design is None:
        design = np.column_stack([np.asarray(x, dtype=float), np.ones(len(y))])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    total = np.sum((y - y.mean()) ** 2)
    return float(1.0 - np.sum(resid**2) / total) if total > 0 else 1.0
