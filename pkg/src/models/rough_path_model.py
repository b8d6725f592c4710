"""
Model built from a rough path.

The structure has the symbols ``Xi_j`` (degree a-1), ``W_a Xi_b`` (2a-1),
``1`` (0) and ``W_j`` (a). ``Pi_s W_j`` is the path increment from ``s``,
``Pi_s Xi_j`` is ``dX^j`` and ``Pi_s W_a Xi_b`` is ``dXX^{a,b}_{s, .}``.
Base points are snapped to the path grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from ..algebra import GradedIndexSet, GradedMap, Homogeneity
from ..errors import ModelError
from .base import Model
from .proxies import CellMeasure, DistributionProxy, GridFn, constant
from .rough_path import RoughPath, chen_residual

logger = logging.getLogger(__name__)

CHEN_TOLERANCE = 1e-8
UNIT = "1"


def noise_label(j: int) -> str:
    return f"Ξ{j + 1}"


def path_label(j: int) -> str:
    return f"W{j + 1}"


def area_label(a: int, b: int) -> str:
    return f"W{a + 1}Ξ{b + 1}"


def rough_path_structure(n: int, alpha: float) -> GradedIndexSet:
    a = Homogeneity.from_number(alpha)
    pairs = [(noise_label(j), a - 1) for j in range(n)]
    pairs += [(area_label(p, q), a * 2 - 1) for p in range(n) for q in range(n)]
    pairs += [(UNIT, Homogeneity(0))]
    pairs += [(path_label(j), a) for j in range(n)]
    return GradedIndexSet.from_pairs(pairs)


class RoughPathModel(Model):
    name = "rough-path"

    def __init__(self, rp: RoughPath, check_chen: bool = True):
        if not 0.0 < rp.alpha < 1.0:
            raise ModelError(f"alpha must lie in (0, 1), got {rp.alpha}")
        if not (np.all(np.isfinite(rp.X)) and np.all(np.isfinite(rp.area))):
            raise ModelError("rough path contains non-finite values")
        if check_chen:
            residual = chen_residual(rp, triples=50, direct=True)
            scale = max(1.0, float(np.max(np.abs(rp.X))) ** 2)
            if not residual <= CHEN_TOLERANCE * scale:
                raise ModelError(f"Chen relation violated: residual {residual:.3e}")
        super().__init__(rough_path_structure(rp.n, rp.alpha), (1,))
        self.rp = rp
        self._parsed: Dict[str, Tuple] = {}
        for j in range(rp.n):
            self._parsed[noise_label(j)] = ("xi", j)
            self._parsed[path_label(j)] = ("w", j)
            for b in range(rp.n):
                self._parsed[area_label(j, b)] = ("area", j, b)
        self._parsed[UNIT] = ("one",)

    def snap(self, x) -> int:
        return self.rp.index(float(np.asarray(x).reshape(-1)[0]))

    def pi(self, x, label: Hashable) -> DistributionProxy:
        rp = self.rp
        i = self.snap(x)
        kind = self._parsed[label]
        origin = float(rp.times[0])
        if kind[0] == "one":
            return constant(1.0)
        if kind[0] == "w":
            j = kind[1]
            return GridFn(rp.X[:, j] - rp.X[i, j], origin, rp.h)
        if kind[0] == "xi":
            return CellMeasure(rp.dX[:, kind[1]], origin, rp.h)
        a, b = kind[1], kind[2]
        masses = rp.area[:, a, b] + (rp.X[:-1, a] - rp.X[i, a]) * rp.dX[:, b]
        return CellMeasure(masses, origin, rp.h)

    def gamma(self, x, y) -> GradedMap:
        """``W_j -> W_j - X^j_{xy} 1`` and ``W_a Xi_b -> W_a Xi_b - X^a_{xy} Xi_b``."""
        inc = self.rp.increment(self.snap(x), self.snap(y))
        images: Dict[Hashable, Dict[Hashable, float]] = {}
        for label in self.labels:
            kind = self._parsed[label]
            image = {label: 1.0}
            if kind[0] == "w":
                image[UNIT] = -inc[kind[1]]
            elif kind[0] == "area":
                image[noise_label(kind[2])] = -inc[kind[1]]
            images[label] = image
        return GradedMap.from_images(self.structure, images)

    def controlled_coefficients(self, Y: np.ndarray, Yprime: np.ndarray) -> np.ndarray:
        """Coefficient rows ``Y(t) 1 + Y'_i(t) W_i`` at every grid node."""
        Y = np.asarray(Y, dtype=float)
        Yprime = np.asarray(Yprime, dtype=float).reshape(len(Y), self.rp.n)
        out = np.zeros((len(Y), len(self.structure)))
        out[:, self.structure.index(UNIT)] = Y
        for j in range(self.rp.n):
            out[:, self.structure.index(path_label(j))] = Yprime[:, j]
        return out


def rough_path_model(rp: RoughPath, check_chen: bool = True) -> RoughPathModel:
    return RoughPathModel(rp, check_chen)


@dataclass(frozen=True)
class ControlledPath:
    """Values ``Y`` and Gubinelli derivative ``Y'`` on the path grid."""

    Y: np.ndarray
    Yprime: np.ndarray

    @classmethod
    def from_function(
        cls,
        rp: RoughPath,
        fn: Callable[[np.ndarray], np.ndarray],
        grad: Callable[[np.ndarray], np.ndarray],
    ) -> "ControlledPath":
        """``Y = fn(X)`` with ``Y' = grad fn(X)``; both act on arrays of shape ``(K+1, n)``."""
        return cls(np.asarray(fn(rp.X), dtype=float), np.asarray(grad(rp.X), dtype=float))

    def remainder(self, rp: RoughPath, s: int, u: int) -> float:
        """``Y(s) - Y(u) + Y'_i(u) X^i_{s,u}``."""
        return float(self.Y[s] - self.Y[u] + np.dot(self.Yprime[u], rp.increment(s, u)))


def controlled_path(model: RoughPathModel, path: ControlledPath) -> np.ndarray:
    return model.controlled_coefficients(path.Y, path.Yprime)


def controlled_remainder_residual(
    model: RoughPathModel,
    path: ControlledPath,
    pairs: Optional[Sequence[Tuple[int, int]]] = None,
    seed: int = 0,
) -> float:
    """Max gap between ``|(Y(s) - Gamma_su Y(u))_0|`` and the remainder ``|R_su|``."""
    rp = model.rp
    coeffs = controlled_path(model, path)
    if pairs is None:
        rng = np.random.default_rng(seed)
        pairs = [tuple(p) for p in rng.integers(0, rp.cells + 1, size=(50, 2))]
    unit = model.structure.index(UNIT)
    worst = 0.0
    for s, u in pairs:
        t_s, t_u = rp.times[s], rp.times[u]
        diff = coeffs[s] - model.gamma(t_s, t_u).apply(coeffs[u])
        worst = max(worst, abs(abs(diff[unit]) - abs(path.remainder(rp, s, u))))
    logger.debug("controlled remainder residual %.3e over %d pairs", worst, len(pairs))
    return worst
