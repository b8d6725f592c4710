"""
Distribution proxies: objects that can be paired with test functions.

``AnalyticFn`` wraps a vectorised closure and integrates by composite
Gauss-Legendre quadrature; ``GridFn`` holds node samples ``f(origin + i h)``
and pairs by the rectangle rule; ``CellMeasure`` holds per-cell masses and
pairs by evaluating the test at the left node of each cell.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np

from .testfns import MonomialWeighted

PANELS_1D = 48
PANELS_2D = 24
NODES_PER_PANEL = 8


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def composite_nodes(lo: float, hi: float, panels: int, per_panel: int = NODES_PER_PANEL):
    """Nodes and weights of composite Gauss-Legendre quadrature on ``[lo, hi]``."""
    ref_x, ref_w = _gauss_legendre(per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halves[:, None] * ref_x[None, :]).ravel()
    weights = (halves[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


class DistributionProxy(ABC):
    """Anything pairable with a test function."""

    @abstractmethod
    def pair(self, test) -> float:
        pass

    def evaluate(self, x) -> np.ndarray:
        """Point values, for proxies that are continuous functions."""
        raise NotImplementedError(f"{type(self).__name__} has no point values")

    def __add__(self, other: "DistributionProxy") -> "DistributionProxy":
        return LinearCombination(((1.0, self), (1.0, other)))

    def __rmul__(self, c: float) -> "DistributionProxy":
        return LinearCombination(((float(c), self),))


@dataclass(frozen=True, eq=False)
class AnalyticFn(DistributionProxy):
    fn: Callable[[np.ndarray], np.ndarray]
    dim: int = 1

    def pair(self, test) -> float:
        integrate_smooth = getattr(test, "integrate_smooth", None)
        if integrate_smooth is not None and self.dim == 1:
            try:
                return float(integrate_smooth(self.fn))
            except AttributeError:
                pass
        bounds = test.bounds
        if self.dim == 1:
            nodes, weights = composite_nodes(*bounds[0], PANELS_1D)
            return float(np.dot(weights, self.fn(nodes) * test(nodes)))
        axes = [composite_nodes(lo, hi, PANELS_2D) for lo, hi in bounds]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=1)
        wgrid = np.ones(1)
        for _, w in axes:
            wgrid = np.multiply.outer(wgrid, w)
        return float(np.dot(wgrid.ravel(), self.fn(points) * test(points)))

    def evaluate(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


def _index_range(origin: float, h: float, size: int, lo: float, hi: float) -> Tuple[int, int]:
    start = max(0, int(np.floor((lo - origin) / h)) - 1)
    stop = min(size, int(np.ceil((hi - origin) / h)) + 2)
    return start, stop


@dataclass(frozen=True, eq=False)
class GridFn(DistributionProxy):
    values: np.ndarray
    origin: float
    h: float

    @property
    def nodes(self) -> np.ndarray:
        return self.origin + self.h * np.arange(len(self.values))

    def pair(self, test) -> float:
        lo, hi = test.bounds[0]
        start, stop = _index_range(self.origin, self.h, len(self.values), lo, hi)
        if stop <= start:
            return 0.0
        t = self.origin + self.h * np.arange(start, stop)
        return float(self.h * np.dot(self.values[start:stop], test(t)))

    def evaluate(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.nodes, self.values)


@dataclass(frozen=True, eq=False)
class CellMeasure(DistributionProxy):
    """Masses of the cells ``[origin + k h, origin + (k+1) h)``."""

    masses: np.ndarray
    origin: float
    h: float

    def pair(self, test) -> float:
        lo, hi = test.bounds[0]
        start, stop = _index_range(self.origin, self.h, len(self.masses), lo, hi)
        if stop <= start:
            return 0.0
        t = self.origin + self.h * np.arange(start, stop)
        return float(np.dot(self.masses[start:stop], test(t)))


@dataclass(frozen=True, eq=False)
class LinearCombination(DistributionProxy):
    terms: Tuple[Tuple[float, DistributionProxy], ...]

    def pair(self, test) -> float:
        return float(sum(c * p.pair(test) for c, p in self.terms if c != 0.0))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = None
        for c, p in self.terms:
            if c != 0.0:
                term = c * np.asarray(p.evaluate(x), dtype=float)
                out = term if out is None else out + term
        return np.zeros_like(x) if out is None else out


@dataclass(frozen=True, eq=False)
class WeightedProxy(DistributionProxy):
    """``(y - center)^k`` times a base proxy."""

    base: DistributionProxy
    center: float
    k: int

    def pair(self, test) -> float:
        if self.k == 0:
            return self.base.pair(test)
        return self.base.pair(MonomialWeighted(test, self.center, self.k))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.base.evaluate(x) * (x - self.center) ** self.k


class ZeroProxy(DistributionProxy):
    def pair(self, test) -> float:
        return 0.0

    def evaluate(self, x) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))


ZERO_PROXY = ZeroProxy()


def constant(c: float, dim: int = 1) -> AnalyticFn:
    if dim == 1:
        return AnalyticFn(lambda y: np.full(np.shape(y), float(c)))
    return AnalyticFn(lambda y: np.full(len(y), float(c)), dim)


def combine(coeffs: Sequence[float], proxies: Sequence[DistributionProxy]) -> DistributionProxy:
    terms = tuple((float(c), p) for c, p in zip(coeffs, proxies) if float(c) != 0.0)
    if not terms:
        return ZERO_PROXY
    return LinearCombination(terms)
