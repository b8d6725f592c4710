"""Model generated by a fixed distribution ``xi`` on the doubled polynomial structure."""

from __future__ import annotations

import logging
from math import comb
from typing import Dict, Hashable, Optional, Tuple

import numpy as np

from ..algebra import GradedIndexSet, GradedMap, Homogeneity
from ..errors import ModelError
from .base import Model
from .proxies import AnalyticFn, CellMeasure, DistributionProxy, WeightedProxy

logger = logging.getLogger(__name__)

POLY = "X"
NOISE = "ΞX"


def noise_structure(max_degree: int, alpha: float) -> GradedIndexSet:
    a = Homogeneity.from_number(alpha)
    pairs = [((POLY, k), Homogeneity(k)) for k in range(max_degree + 1)]
    pairs += [((NOISE, k), Homogeneity(k) - a) for k in range(max_degree + 1)]
    return GradedIndexSet.from_pairs(pairs)


class MollifiedNoiseModel(Model):
    """``(Pi_x X^k)(y) = (y-x)^k`` and ``(Pi_x Xi X^k)(y) = (y-x)^k xi(y)``."""

    name = "mollified-noise"

    def __init__(self, xi: DistributionProxy, max_degree: int = 1, alpha: float = 0.6):
        if max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        super().__init__(noise_structure(max_degree, alpha), (1,))
        self.xi = xi
        self.alpha = float(alpha)
        self.max_degree = max_degree
        self.is_continuous = isinstance(xi, AnalyticFn)

    def pi(self, x, label: Hashable) -> DistributionProxy:
        block, k = label
        x = float(np.asarray(x).reshape(-1)[0])
        if block == POLY:
            return AnalyticFn(lambda y: (np.asarray(y, dtype=float) - x) ** k)
        return WeightedProxy(self.xi, x, k)

    def gamma(self, x, y) -> GradedMap:
        h = float(np.asarray(y).reshape(-1)[0]) - float(np.asarray(x).reshape(-1)[0])
        images: Dict[Hashable, Dict[Hashable, float]] = {}
        for block, k in self.labels:
            images[(block, k)] = {
                (block, l): comb(k, l) * (-h) ** (k - l) for l in range(k + 1)
            }
        return GradedMap.from_images(self.structure, images)


def mollified_noise_model(
    xi: DistributionProxy, max_degree: int = 1, alpha: float = 0.6
) -> MollifiedNoiseModel:
    return MollifiedNoiseModel(xi, max_degree, alpha)


def white_noise(
    level: int, seed: Optional[int], window: Tuple[float, float] = (-1.0, 2.0)
) -> CellMeasure:
    """
    Grid white noise: i.i.d. ``N(0, h)`` masses on the cells of ``window``.

    Raises:
        ModelError: If no seed is given
    """
    if seed is None:
        raise ModelError("white noise needs an explicit seed")
    h = 2.0**-level
    cells = int(round((window[1] - window[0]) / h))
    rng = np.random.default_rng(seed)
    masses = rng.normal(0.0, np.sqrt(h), size=cells)
    logger.debug("white noise on %d cells (level %d, seed %d)", cells, level, seed)
    return CellMeasure(masses, float(window[0]), h)
