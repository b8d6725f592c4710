"""
Test functions paired against distribution proxies.

A test function exposes ``dim``, ``bounds`` (one interval per coordinate
outside of which it vanishes) and a vectorised ``__call__`` taking points of
shape ``(m,)`` in one dimension or ``(m, dim)`` otherwise. Tests that know a
better way to integrate smooth functions against themselves also provide
``integrate_smooth(g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..wavelets import ScalingFunction, phi_scaled
from ..wavelets.scaling import pair_smooth

Bounds = Tuple[Tuple[float, float], ...]


def _raw_bump(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def bump_mass() -> float:
    value, _ = integrate.quad(
        lambda u: math.exp(-1.0 / (1.0 - u * u)) if abs(u) < 1.0 else 0.0,
        -1.0,
        1.0,
        epsabs=1e-14,
        epsrel=1e-14,
    )
    return value


def unit_bump(u) -> np.ndarray:
    """``exp(-1/(1-u^2))`` on (-1, 1), normalised to unit integral."""
    return _raw_bump(u) / bump_mass()


def _as_points(points, dim: int) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if dim == 1:
        return p.reshape(-1)
    return p.reshape(-1, dim)


@dataclass(frozen=True)
class Bump:
    """Rescaled tensor bump ``phi^lam_x(y) = prod_i lam^-s_i b((y_i - x_i) / lam^s_i)``."""

    center: Tuple[float, ...]
    lam: float
    scaling: Tuple[int, ...] = (1,)

    def __post_init__(self):
        center = tuple(np.atleast_1d(np.asarray(self.center, dtype=float)).tolist())
        scaling = tuple(self.scaling)
        if len(scaling) == 1 and len(center) > 1:
            scaling = scaling * len(center)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "scaling", scaling)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def widths(self) -> Tuple[float, ...]:
        return tuple(self.lam**s for s in self.scaling)

    @property
    def bounds(self) -> Bounds:
        return tuple((c - w, c + w) for c, w in zip(self.center, self.widths))

    def __call__(self, points) -> np.ndarray:
        p = _as_points(points, self.dim)
        if self.dim == 1:
            w = self.widths[0]
            return unit_bump((p - self.center[0]) / w) / w
        out = np.ones(len(p))
        for i, (c, w) in enumerate(zip(self.center, self.widths)):
            out *= unit_bump((p[:, i] - c) / w) / w
        return out


@dataclass(frozen=True)
class FunctionTest:
    """Wrap an arbitrary compactly supported function."""

    fn: Callable[[np.ndarray], np.ndarray]
    bounds: Bounds

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def __call__(self, points) -> np.ndarray:
        return np.asarray(self.fn(_as_points(points, self.dim)), dtype=float)


@dataclass(frozen=True)
class ScaledScalingFunction:
    """Wavelet test ``phi^n_y``."""

    sf: ScalingFunction
    n: int
    y: float

    dim = 1

    @property
    def bounds(self) -> Bounds:
        h = 2.0**-self.n
        return ((self.y, self.y + self.sf.length * h),)

    def __call__(self, points) -> np.ndarray:
        return phi_scaled(self.sf, self.n, self.y, _as_points(points, 1))

    def integrate_smooth(self, g: Callable[[np.ndarray], np.ndarray]) -> float:
        return pair_smooth(self.sf, self.n, self.y, g)


@dataclass(frozen=True)
class MonomialWeighted:
    """``y -> test(y) * (y - center)^k`` (one dimension)."""

    test: object
    center: float
    k: int

    @property
    def dim(self) -> int:
        return self.test.dim

    @property
    def bounds(self) -> Bounds:
        return self.test.bounds

    def __call__(self, points) -> np.ndarray:
        p = _as_points(points, 1)
        return self.test(p) * (p - self.center) ** self.k

    def integrate_smooth(self, g):
        inner = getattr(self.test, "integrate_smooth", None)
        if inner is None:
            raise AttributeError("integrate_smooth")
        return inner(lambda y: g(y) * (y - self.center) ** self.k)


@dataclass(frozen=True)
class IndicatorTest:
    """Mollified indicator of ``[s, t]`` at scale ``width`` (one dimension)."""

    s: float
    t: float
    width: float

    dim = 1

    @property
    def bounds(self) -> Bounds:
        return ((self.s - self.width, self.t + self.width),)

    def __call__(self, points) -> np.ndarray:
        p = _as_points(points, 1)
        return _smooth_step((p - self.s) / self.width) * _smooth_step((self.t - p) / self.width)


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """Smooth transition from 0 (u <= -1) to 1 (u >= 1)."""
    a = _raw_bump_tail(1.0 + u)
    b = _raw_bump_tail(1.0 - u)
    return a / (a + b)


def _raw_bump_tail(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = np.exp(-1.0 / v[pos])
    return out


def bump_family(center, lambdas: Sequence[float], scaling: Optional[Sequence[int]] = None):
    scaling = tuple(scaling or (1,))
    return [Bump(center, lam, scaling) for lam in lambdas]
