"""
Integration of controlled paths against a rough path.

``rough_integrate`` sums the compensated increments
``Y(s) X^j_{s,t} + Y'_i(s) XX^{i,j}_{s,t}`` over the grid cells; the same
quantity is the reconstruction of ``Y Xi_j`` tested against indicators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..algebra import Homogeneity
from ..errors import PairingError
from ..models import ControlledPath, IndicatorTest, RoughPath, RoughPathModel, area_label, noise_label
from ..models.fits import RateFit, fit_rate
from .distribution import ModelledDistribution
from .reconstruct import reconstruct

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoughIntegral:
    times: np.ndarray
    Z: np.ndarray
    component: int

    def rows(self) -> List[Dict[str, float]]:
        return [{"t": float(t), "Z": float(z)} for t, z in zip(self.times, self.Z)]


def _check_alpha(rp: RoughPath) -> None:
    if rp.alpha <= 1.0 / 3.0:
        raise PairingError(f"rough integration needs alpha > 1/3, got {rp.alpha}")


def rough_integrate(path: ControlledPath, rp: RoughPath, j: int) -> RoughIntegral:
    """
    ``Z_t = int_0^t Y dX^j`` by compensated Riemann sums on the grid of ``rp``.

    Raises:
        PairingError: If ``alpha <= 1/3``
    """
    _check_alpha(rp)
    if not 0 <= j < rp.n:
        raise IndexError(f"component {j} out of range for a path in R^{rp.n}")
    Y = np.asarray(path.Y, dtype=float)
    Yp = np.asarray(path.Yprime, dtype=float).reshape(len(Y), rp.n)
    steps = Y[:-1] * rp.dX[:, j] + np.einsum("ki,ki->k", Yp[:-1], rp.area[:, :, j])
    Z = np.zeros(len(Y))
    np.cumsum(steps, out=Z[1:])
    return RoughIntegral(rp.times.copy(), Z, j)


def restrict(path: ControlledPath, factor: int) -> ControlledPath:
    return ControlledPath(path.Y[::factor], path.Yprime[::factor])


@dataclass(frozen=True)
class LevelComparison:
    levels: List[int]
    integrals: List[RoughIntegral]
    differences: List[float]

    def to_dict(self) -> Dict:
        return {"levels": self.levels, "sup_differences": self.differences}


def rough_integral_levels(
    path: ControlledPath, rp: RoughPath, j: int, coarsenings: Sequence[int] = (2, 1, 0)
) -> LevelComparison:
    """Integrals at the path level minus each coarsening and their sup gaps on shared nodes."""
    integrals = []
    levels = []
    for c in coarsenings:
        factor = 2**c
        integrals.append(rough_integrate(restrict(path, factor), rp.coarsen(factor), j))
        levels.append(rp.level - c)
    diffs = []
    for (a, ia), (b, ib) in zip(zip(coarsenings, integrals), zip(coarsenings[1:], integrals[1:])):
        step = 2 ** (a - b)
        diffs.append(float(np.max(np.abs(ia.Z - ib.Z[::step]))))
    return LevelComparison(levels, integrals, diffs)


def remainder_fit(
    Z: RoughIntegral, path: ControlledPath, rp: RoughPath, gaps: Sequence[int] = None
) -> RateFit:
    """Fit ``sup_s |Z_{s,t} - Y(s) X^j_{s,t} - Y'_i(s) XX^{i,j}_{s,t}|`` against ``t - s``."""
    j = Z.component
    gaps = gaps or [2**p for p in range(0, max(1, rp.level - 2))]
    values = []
    for gap in gaps:
        worst = 0.0
        for s in range(0, rp.cells - gap + 1, max(1, gap // 2)):
            t = s + gap
            local = path.Y[s] * rp.increment(s, t)[j] + np.dot(path.Yprime[s], rp.iterated(s, t)[:, j])
            worst = max(worst, abs(Z.Z[t] - Z.Z[s] - local))
        values.append(worst)
    return fit_rate([g * rp.h for g in gaps], values)


def integrand_distribution(model: RoughPathModel, path: ControlledPath, j: int) -> ModelledDistribution:
    """``Y Xi_j = Y Xi_j + Y'_i W_i Xi_j`` with gamma ``3 alpha - 1``."""
    rp = model.rp
    space = model.structure
    table = np.zeros((len(rp.times), len(space)))
    table[:, space.index(noise_label(j))] = path.Y
    for i in range(rp.n):
        table[:, space.index(area_label(i, j))] = path.Yprime[:, i]
    a = Homogeneity.from_number(rp.alpha)
    sector = (noise_label(j),) + tuple(area_label(i, j) for i in range(rp.n))
    return ModelledDistribution.from_table(
        model, a * 3 - 1, rp.times, table, alpha=a - 1, sector=sector, name=f"YΞ{j + 1}"
    )


def integrate_by_reconstruction(
    model: RoughPathModel,
    path: ControlledPath,
    j: int,
    intervals: Sequence[Tuple[float, float]],
    n: int,
    width: float,
    family: str = "db3",
) -> List[float]:
    """Pair ``R(Y Xi_j)`` at level ``n`` with mollified indicators of ``[s, t]``."""
    _check_alpha(model.rp)
    R = reconstruct(integrand_distribution(model, path, j), n, family)
    return [R.pair(IndicatorTest(s, t, width)) for s, t in intervals]
