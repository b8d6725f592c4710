"""Canonical polynomial model ``(Pi_x X^k)(y) = (y - x)^k``, ``Gamma_xy = Gamma_{y-x}``."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..algebra import GradedMap, polynomial_gamma, polynomial_space
from .base import Model
from .proxies import AnalyticFn


def _point(x, dim: int) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float)).reshape(dim)


class PolynomialModel(Model):
    name = "polynomial"
    is_continuous = True

    def __init__(self, d: int = 1, max_degree: int = 2, scaling: Sequence[int] = None):
        if max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        scaling = tuple(scaling or (1,) * d)
        super().__init__(polynomial_space(d, max_degree, scaling), scaling)
        self.max_degree = max_degree

    def pi(self, x, label) -> AnalyticFn:
        k = np.asarray(label)
        x = _point(x, self.dim)
        if self.dim == 1:
            return AnalyticFn(lambda y: (np.asarray(y, dtype=float) - x[0]) ** k[0])
        return AnalyticFn(
            lambda y: np.prod((np.asarray(y, dtype=float) - x) ** k, axis=-1), self.dim
        )

    def gamma(self, x, y) -> GradedMap:
        h = _point(y, self.dim) - _point(x, self.dim)
        return polynomial_gamma(self.structure, h)

    def jet(self, fn_derivatives: Sequence[float]) -> np.ndarray:
        """Taylor jet ``sum_k f^(k)(x)/k! X^k`` from derivatives taken at the base point."""
        if self.dim != 1:
            raise ValueError("jet is only defined for one-dimensional models")
        out = np.zeros(len(self.structure))
        for i, (k,) in enumerate(self.labels):
            if k < len(fn_derivatives):
                out[i] = fn_derivatives[k] / math.factorial(k)
        return out


def polynomial_model(d: int = 1, max_degree: int = 2, scaling: Sequence[int] = None) -> PolynomialModel:
    return PolynomialModel(d, max_degree, scaling)


def taylor_reexpansion_residual(m: int, x0: float, x1: float, x: float) -> float:
    """``|(x-x0)^m - sum_{k+l=m} C(m,k) (x1-x0)^k (x-x1)^l|`` through ``Gamma``."""
    model = PolynomialModel(1, m)
    # Pi_{x1} Gamma_{x1 x0} X^m = Pi_{x0} X^m
    image = model.gamma(x1, x0).image((m,))
    total = sum(float(c) * (x - x1) ** l for (l,), c in image.items())
    return abs((x - x0) ** m - total)
