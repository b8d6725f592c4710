"""Property checks for scaling functions: the facts the reconstruction proof uses."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List

import numpy as np

from .scaling import (
    ScalingFunction,
    detail_moments,
    detail_scaling_product,
    inner_product,
    phi_scaled,
    refinement_residual,
)

logger = logging.getLogger(__name__)

REPRODUCTION_SAMPLE_LEVEL = 6
REPRODUCTION_WINDOW = (0.0, 4.0)
REPRODUCTION_TOLERANCE = 1e-6
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ReproductionReport:
    degree: int
    residuals: List[float]
    supported: bool
    condition: float
    well_conditioned: bool

    @property
    def residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def check_poly_reproduction(sf: ScalingFunction, degree: int) -> ReproductionReport:
    """Fit ``sum_y P(y) phi(x - y) = x^p`` on integer shifts by collocation.

    Collocation points lie on a dyadic grid coarser than the sample grid, so
    the scaling function is evaluated exactly there. ``supported`` is false
    when some monomial up to ``degree`` is not reproduced.
    """
    lo, hi = REPRODUCTION_WINDOW
    step = 2.0 ** -min(REPRODUCTION_SAMPLE_LEVEL, sf.level)
    x = np.arange(lo, hi + step / 2, step)
    shifts = np.arange(int(np.floor(lo)) - sf.length, int(np.ceil(hi)) + 1)
    design = np.stack([sf(x - y) for y in shifts], axis=1)
    condition = float(np.linalg.cond(design))
    residuals = []
    for p in range(degree + 1):
        target = x**p
        coeffs = np.linalg.lstsq(design, target, rcond=None)[0]
        residuals.append(float(np.max(np.abs(design @ coeffs - target))))
    supported = all(r < REPRODUCTION_TOLERANCE for r in residuals)
    if not supported:
        logger.debug("degree %d not reproduced by %s", degree, sf.name)
    return ReproductionReport(
        degree, residuals, supported, condition, condition < CONDITION_LIMIT
    )


@dataclass(frozen=True)
class DetailFamily:
    """Detail functions of a one-dimensional multiresolution (a single one)."""

    coeffs: np.ndarray
    moments: np.ndarray
    vanishing: int
    scaling_products: Dict[int, float] = field(default_factory=dict)

    @property
    def moment_residual(self) -> float:
        return float(np.max(np.abs(self.moments[: self.vanishing]))) if self.vanishing else 0.0


def wavelet_family(sf: ScalingFunction) -> DetailFamily:
    """Detail function by the alternating flip with its moments and orthogonality data."""
    moments = detail_moments(sf, sf.order + 1)
    products = {
        m: detail_scaling_product(sf, m) for m in range(-sf.length, sf.length + 1)
    }
    return DetailFamily(sf.detail_coeffs, moments, sf.order, products)


def orthonormality_residual(sf: ScalingFunction, max_level: int = 0, window: int = 4) -> float:
    """``max |<phi^n_x, phi^n_y> - delta_xy|`` over a window of each level up to ``max_level``."""
    worst = float(np.max(np.abs(sf.autocorrelation - _delta(sf.length))))
    for n in range(1, max_level + 1):
        h = 2.0**-n
        for i in range(window):
            for j in range(window):
                got = inner_product(sf, n, i * h, n, j * h)
                worst = max(worst, abs(got - (1.0 if i == j else 0.0)))
    return worst


def _delta(length: int) -> np.ndarray:
    d = np.zeros(2 * length + 1)
    d[length] = 1.0
    return d


def nesting_residual(sf: ScalingFunction, n: int, y: float) -> float:
    """Sample-level residual of ``phi^n_y = sum_k a_k phi^{n+1}_{y + k 2^(-n-1)}``."""
    support = sf.length * 2.0**-n
    x = y + np.linspace(0.0, support, 257)
    lhs = phi_scaled(sf, n, y, x)
    rhs = np.zeros_like(x)
    for k, ak in enumerate(sf.coeffs):
        rhs += ak * phi_scaled(sf, n + 1, y + k * 2.0 ** -(n + 1), x)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class WaveletReport:
    name: str
    orthonormality: float
    refinement: float
    reproduction_degree0: float
    vanishing_moments: float
    detail_orthogonality: float
    nesting: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def wavelet_report(sf: ScalingFunction, tol: float = 1e-8) -> WaveletReport:
    """All property residuals for one scaling function."""
    detail = wavelet_family(sf)
    ortho = orthonormality_residual(sf, max_level=3)
    refine = refinement_residual(sf)
    repro = check_poly_reproduction(sf, 0).residual
    moments = detail.moment_residual
    cross = max(abs(v) for v in detail.scaling_products.values())
    nest = nesting_residual(sf, 2, 0.25)
    passed = (
        ortho < tol
        and refine < tol
        and repro < REPRODUCTION_TOLERANCE
        and moments < tol
        and cross < tol
        and nest < tol
    )
    logger.info("%s: orthonormality %.2e refinement %.2e", sf.name, ortho, refine)
    return WaveletReport(sf.name, ortho, refine, repro, moments, cross, nest, passed)
