"""
Scaling functions by the cascade algorithm, plus exact quantities derived from
the refinement coefficients (autocorrelation, moments, inner products).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import comb, sqrt
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev

from ..errors import CascadeError
from .families import WaveletFamily, get_family

logger = logging.getLogger(__name__)

DEFAULT_LEVEL = 12
SUM_TOLERANCE = 1e-12
BLOWUP = 1e6
QUADRATURE_NODES = 8


@dataclass(frozen=True, eq=False)
class ScalingFunction:
    """Samples of ``phi`` at ``i 2^-level`` for ``0 <= i <= N 2^level``."""

    coeffs: np.ndarray
    level: int
    samples: np.ndarray
    regularity: float = 0.0
    order: int = 1
    name: str = "custom"

    @property
    def length(self) -> int:
        return len(self.coeffs) - 1

    @property
    def support(self):
        return (0.0, float(self.length))

    @property
    def grid(self) -> np.ndarray:
        return np.arange(len(self.samples)) / 2.0**self.level

    def __call__(self, x) -> np.ndarray:
        """Linear interpolation of the samples; zero outside the support."""
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.grid, self.samples, left=0.0, right=0.0)

    @cached_property
    def detail_coeffs(self) -> np.ndarray:
        """``b_k = (-1)^k a_{N-k}``."""
        a = self.coeffs
        return np.array([(-1) ** k * a[self.length - k] for k in range(len(a))])

    def detail(self, x) -> np.ndarray:
        """Detail function ``psi(x) = sqrt(2) sum_k b_k phi(2x - k)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, b in enumerate(self.detail_coeffs):
            out = out + sqrt(2.0) * b * self(2 * x - k)
        return out

    @cached_property
    def autocorrelation(self) -> np.ndarray:
        """``A(m) = int phi(x) phi(x - m) dx`` for ``m = -N..N``."""
        return autocorrelation(self.coeffs)

    def gram(self, m: int) -> float:
        n = self.length
        if abs(m) > n:
            return 0.0
        return float(self.autocorrelation[m + n])

    @cached_property
    def moments(self) -> np.ndarray:
        return scaling_moments(self.coeffs, QUADRATURE_NODES + 2)

    @cached_property
    def _quadrature(self):
        return _moment_quadrature(self.moments, self.length, QUADRATURE_NODES)

    def integrate_against(self, g: Callable[[np.ndarray], np.ndarray]) -> float:
        """``int g(u) phi(u) du`` by moment-matched Chebyshev quadrature."""
        nodes, weights = self._quadrature
        return float(np.dot(weights, g(nodes)))


def _integer_values(a: np.ndarray) -> np.ndarray:
    n = len(a) - 1
    m = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        for k in range(n + 1):
            idx = 2 * j - k
            if 0 <= idx <= n:
                m[j, k] = sqrt(2.0) * a[idx]
    system = m - np.eye(n + 1)
    # phi(N) = 0 fixes the right-continuous convention for discontinuous phi
    system = system[:, :n]
    lhs = np.vstack([system, np.ones((1, n))])
    rhs = np.zeros(n + 2)
    rhs[-1] = 1.0
    values = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    return np.append(values, 0.0)


def cascade_evaluate(
    coeffs, level: int = DEFAULT_LEVEL, regularity: float = 0.0, order: int = 1,
    name: str = "custom",
) -> ScalingFunction:
    """Solve the refinement equation at integers and refine to ``level``.

    Args:
        coeffs: Refinement coefficients ``a_k`` or a family name.
        level: Dyadic level of the returned samples.

    Raises:
        CascadeError: If the coefficients do not sum to sqrt(2) or the cascade diverges.
    """
    if isinstance(coeffs, (str, int)) and not isinstance(coeffs, bool):
        return from_family(get_family(coeffs), level)
    a = np.asarray(coeffs, dtype=float)
    if a.ndim != 1 or len(a) < 2:
        raise CascadeError("need at least two refinement coefficients")
    if abs(a.sum() - sqrt(2.0)) > SUM_TOLERANCE:
        raise CascadeError(f"coefficients sum to {a.sum():.15f}, expected sqrt(2)")
    if level < 0:
        raise CascadeError("level must be non-negative")
    n = len(a) - 1
    g = _integer_values(a)
    for j in range(1, level + 1):
        step = 2 ** (j - 1)
        nxt = np.zeros(n * 2**j + 1)
        idx = np.arange(len(nxt))
        for k, ak in enumerate(a):
            src = idx - k * step
            mask = (src >= 0) & (src < len(g))
            nxt[mask] += sqrt(2.0) * ak * g[src[mask]]
        g = nxt
        if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > BLOWUP:
            raise CascadeError(f"cascade diverged at level {j}")
    logger.debug("cascade of %d taps refined to level %d", len(a), level)
    return ScalingFunction(a, level, g, regularity, order, name)


def from_family(family: WaveletFamily, level: int = DEFAULT_LEVEL) -> ScalingFunction:
    return cascade_evaluate(
        family.coeffs, level, family.regularity, family.order, family.name
    )


def phi_scaled(sf: ScalingFunction, n: int, y, x) -> np.ndarray:
    """``phi^n_y(x) = 2^(n/2) phi(2^n (x - y))``."""
    scale = 2.0**n
    return np.sqrt(scale) * sf(scale * (np.asarray(x, dtype=float) - y))


def refinement_residual(sf: ScalingFunction) -> float:
    """Sup over the sample grid of ``2^-1/2 phi(x/2) - sum_k a_k phi(x - k)``."""
    g = sf.samples
    size = len(g)
    idx = np.arange(size)
    lhs = g / sqrt(2.0)
    rhs = np.zeros(size)
    for k, ak in enumerate(sf.coeffs):
        src = 2 * idx - k * 2**sf.level
        mask = (src >= 0) & (src < size)
        rhs[mask] += ak * g[src[mask]]
    return float(np.max(np.abs(lhs - rhs)))


def autocorrelation(coeffs: Sequence[float]) -> np.ndarray:
    """Fixed point of ``A(m) = sum_j r(j) A(2m + j)`` normalised by ``sum A = 1``."""
    a = np.asarray(coeffs, dtype=float)
    n = len(a) - 1
    r = {
        j: sum(a[k] * a[k + j] for k in range(n + 1) if 0 <= k + j <= n)
        for j in range(-n, n + 1)
    }
    size = 2 * n + 1
    system = np.eye(size)
    for m in range(-n, n + 1):
        for j, rj in r.items():
            target = 2 * m + j
            if -n <= target <= n:
                system[m + n, target + n] -= rj
    lhs = np.vstack([system, np.ones((1, size))])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    return np.linalg.lstsq(lhs, rhs, rcond=None)[0]


def scaling_moments(coeffs: Sequence[float], count: int) -> np.ndarray:
    """Exact moments ``int x^p phi`` for ``p < count`` from the refinement recursion."""
    a = np.asarray(coeffs, dtype=float)
    k = np.arange(len(a), dtype=float)
    mu = np.zeros(count)
    mu[0] = 1.0
    for p in range(1, count):
        acc = 0.0
        for q in range(p):
            acc += comb(p, q) * float(np.dot(a, k ** (p - q))) * mu[q]
        mu[p] = 2.0 ** (-p - 0.5) * acc / (1.0 - 2.0**-p)
    return mu


def detail_moments(sf: ScalingFunction, count: int) -> np.ndarray:
    """Exact moments ``int x^p psi`` of the detail function."""
    b = sf.detail_coeffs
    k = np.arange(len(b), dtype=float)
    mu = scaling_moments(sf.coeffs, count)
    nu = np.zeros(count)
    for p in range(count):
        acc = 0.0
        for q in range(p + 1):
            acc += comb(p, q) * float(np.dot(b, k ** (p - q))) * mu[q]
        nu[p] = 2.0 ** (-p - 0.5) * acc
    return nu


def detail_scaling_product(sf: ScalingFunction, m: int) -> float:
    """``<psi, phi(. - m)> = sum_{k,j} b_k a_j A(2m + j - k)``."""
    total = 0.0
    for k, b in enumerate(sf.detail_coeffs):
        for j, a in enumerate(sf.coeffs):
            total += b * a * sf.gram(2 * m + j - k)
    return total


def refine_to_level(sf: ScalingFunction, n: int, y: float, target: int):
    """Write ``phi^n_y`` as ``sum_j c_j phi^target_{y + j 2^-target}``."""
    if target < n:
        raise ValueError("target level must not be coarser than n")
    c = np.array([1.0])
    for _ in range(target - n):
        nxt = np.zeros(2 * (len(c) - 1) + len(sf.coeffs))
        for i, ci in enumerate(c):
            nxt[2 * i: 2 * i + len(sf.coeffs)] += ci * sf.coeffs
        c = nxt
    return c


def inner_product(sf: ScalingFunction, n1: int, y1: float, n2: int, y2: float) -> float:
    """Exact ``<phi^n1_y1, phi^n2_y2>`` for base points on a common lattice.

    Raises:
        ValueError: If the base points are not on the finer dyadic lattice.
    """
    if n1 > n2:
        n1, y1, n2, y2 = n2, y2, n1, y1
    c = refine_to_level(sf, n1, y1, n2)
    offset = (y2 - y1) * 2.0**n2
    shift = int(round(offset))
    if abs(offset - shift) > 1e-9:
        raise ValueError("base points are not on a common dyadic lattice")
    total = 0.0
    for j, cj in enumerate(c):
        total += cj * sf.gram(shift - j)
    return total


def _moment_quadrature(mu: np.ndarray, length: int, count: int):
    """Chebyshev nodes on ``[0, N]`` with weights exact for degree ``< count``."""
    nodes_ref = np.cos((2 * np.arange(count) + 1) * np.pi / (2 * count))
    half = length / 2.0
    nodes = half * (nodes_ref + 1.0)
    # moments of phi in the reference variable s = u / half - 1
    ref_moments = np.zeros(count)
    for q in range(count):
        acc = 0.0
        for r in range(q + 1):
            acc += comb(q, r) * (1.0 / half) ** r * (-1.0) ** (q - r) * mu[r]
        ref_moments[q] = acc
    cheb_moments = np.zeros(count)
    for p in range(count):
        power = chebyshev.cheb2poly(np.eye(count)[p])
        cheb_moments[p] = np.dot(power, ref_moments[: len(power)])
    vander = chebyshev.chebvander(nodes_ref, count - 1).T
    weights = np.linalg.solve(vander, cheb_moments)
    return nodes, weights


def pair_smooth(sf: ScalingFunction, n: int, y: float, g: Callable) -> float:
    """``int g(x) phi^n_y(x) dx`` for smooth ``g``."""
    scale = 2.0**-n
    return np.sqrt(scale) * sf.integrate_against(lambda u: g(y + scale * u))


def cached_scaling_function(family="db2", level: int = DEFAULT_LEVEL) -> ScalingFunction:
    key = (family if isinstance(family, str) else get_family(family).name, level)
    if key not in _CACHE:
        _CACHE[key] = cascade_evaluate(family, level)
    return _CACHE[key]


_CACHE: dict = {}

__all__ = [
    "ScalingFunction",
    "autocorrelation",
    "cached_scaling_function",
    "cascade_evaluate",
    "detail_moments",
    "detail_scaling_product",
    "from_family",
    "inner_product",
    "pair_smooth",
    "phi_scaled",
    "refine_to_level",
    "refinement_residual",
    "scaling_moments",
]
