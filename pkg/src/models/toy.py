"""
Toy structure ``{1, Xi, Xi^2}`` with homogeneities ``0, -k, -2k`` and trivial group.

Two realisations: the limiting model (``Pi Xi = 0``, ``Pi Xi^2 = c``) and the
sine family ``Pi Xi = sqrt(2c) sin(n y)``, ``Pi Xi^2 = 2c sin^2(n y)``, whose
pairings converge to those of the limiting model as ``n`` grows.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..algebra import GradedIndexSet, GradedMap, Homogeneity
from .base import Model
from .proxies import AnalyticFn, DistributionProxy, ZERO_PROXY, constant

TOY_LABELS = ("Ξ2", "Ξ", "1")


def toy_structure() -> GradedIndexSet:
    return GradedIndexSet(
        TOY_LABELS, (Homogeneity(0, -2), Homogeneity(0, -1), Homogeneity(0))
    )


def toy_power(label: str) -> int:
    return {"1": 0, "Ξ": 1, "Ξ2": 2}[label]


def toy_label(power: int) -> str:
    return {0: "1", 1: "Ξ", 2: "Ξ2"}[power]


class _ToyModel(Model):
    is_continuous = True

    def __init__(self, c: float):
        super().__init__(toy_structure(), (1,))
        self.c = float(c)

    def gamma(self, x, y) -> GradedMap:
        return GradedMap.identity(self.structure)


class ToyLimitModel(_ToyModel):
    name = "toy-limit"

    def pi(self, x, label) -> DistributionProxy:
        power = toy_power(label)
        if power == 0:
            return constant(1.0)
        if power == 1:
            return ZERO_PROXY
        return constant(self.c)


class ToySineModel(_ToyModel):
    name = "toy-sine"

    def __init__(self, c: float, n: int):
        if c < 0:
            raise ValueError("the sine realisation needs c >= 0")
        super().__init__(c)
        self.n = int(n)

    def pi(self, x, label) -> DistributionProxy:
        power = toy_power(label)
        amp = np.sqrt(2.0 * self.c)
        n = self.n
        if power == 0:
            return constant(1.0)
        if power == 1:
            return AnalyticFn(lambda y: amp * np.sin(n * np.asarray(y, dtype=float)))
        return AnalyticFn(lambda y: 2.0 * self.c * np.sin(n * np.asarray(y, dtype=float)) ** 2)


def toy_pair(c: float, n: int) -> Tuple[ToyLimitModel, ToySineModel]:
    """The limiting model and the ``n``-th sine model for the same ``c``."""
    return ToyLimitModel(c), ToySineModel(c, n)
