"""
Renormalised pairing with a kernel that is not locally integrable.

``(RW)(phi) = int W(x) (phi(x) - phi(0)) dx`` is finite for ``|W(x)| <~ 1/|x|``
because the bracket vanishes linearly at the origin. For the capped kernels
``W_eps`` the same pairing equals ``int W_eps phi - C_eps phi(0)`` with
``C_eps = int W_eps``, and converges to ``(RW)(phi)`` as ``eps -> 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..kernels.decompose import cutoff
from ..models.fits import RateFit, fit_rate
from ..models.proxies import DistributionProxy, composite_nodes
from ..models.testfns import Bump

logger = logging.getLogger(__name__)

ANNULUS_PANELS = 8
IDENTITY_TOLERANCE = 1e-6


def _origin_value(test) -> float:
    return float(np.asarray(test(np.array([0.0]))).reshape(-1)[0])


def _test_points(test) -> List[float]:
    return [p for interval in test.bounds for p in interval]


@dataclass(frozen=True, eq=False)
class RenormalizedDistribution(DistributionProxy):
    """
    ``RW`` for ``W`` supported in ``[-radius, radius]``.

    Pairs by Gauss-Legendre quadrature on the dyadic annuli
    ``radius * 2^-(n+1) <= |x| <= radius * 2^-n``, ``n < levels``; the inner
    ball is integrated as well, the integrand being bounded there.
    ``breakpoints`` are extra points where ``W`` is not smooth.
    """

    W: Callable[[np.ndarray], np.ndarray]
    radius: float = 1.0
    levels: int = 40
    breakpoints: Tuple[float, ...] = field(default_factory=tuple)

    def edges(self, extra: Sequence[float] = ()) -> np.ndarray:
        scales = self.radius * 2.0 ** -np.arange(self.levels + 1)
        cuts = [abs(b) for b in self.breakpoints] + [-abs(b) for b in self.breakpoints]
        cuts += [p for p in extra if -self.radius < p < self.radius]
        points = np.concatenate([scales, -scales, [0.0], cuts])
        return np.unique(points)

    def pair(self, test) -> float:
        phi0 = _origin_value(test)
        edges = self.edges(_test_points(test))
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes, weights = composite_nodes(lo, hi, ANNULUS_PANELS)
            values = np.asarray(self.W(nodes), dtype=float)
            total += float(np.dot(weights, values * (np.asarray(test(nodes)) - phi0)))
        return total


def renormalized_distribution(
    W: Callable[[np.ndarray], np.ndarray],
    radius: float = 1.0,
    levels: int = 40,
    breakpoints: Sequence[float] = (),
) -> RenormalizedDistribution:
    return RenormalizedDistribution(W, radius, levels, tuple(breakpoints))


def inverse_distance_kernel(radius: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """``W(x) = psi(|x| / radius) / |x|``; even, smooth away from 0, zero beyond ``radius``."""

    def W(x):
        r = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
        with np.errstate(divide="ignore"):
            return cutoff(r / radius) / r

    return W


def capped_kernel(W: Callable[[np.ndarray], np.ndarray], eps: float) -> Callable[[np.ndarray], np.ndarray]:
    """``W_eps = W`` on ``|x| >= eps`` and ``W(+-eps)`` inside, so ``|W_eps| <~ 1/eps``."""

    def W_eps(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        inner = np.abs(x) < eps
        clipped = np.where(inner, np.where(x >= 0, eps, -eps), x)
        return np.asarray(W(clipped), dtype=float)

    return W_eps


def _inner_points(points: Sequence[float], radius: float) -> List[float]:
    return sorted({float(p) for p in points if -radius < p < radius} | {0.0})


def kernel_mass(W: Callable[[np.ndarray], np.ndarray], radius: float, points: Sequence[float] = ()) -> float:
    """``int W`` for a bounded kernel."""
    value, _ = integrate.quad(
        lambda x: float(W(np.array([x]))[0]),
        -radius,
        radius,
        points=_inner_points(points, radius),
        limit=400,
        epsabs=1e-13,
        epsrel=1e-11,
    )
    return value


def plain_pairing(W: Callable[[np.ndarray], np.ndarray], test, radius: float, points: Sequence[float] = ()) -> float:
    """``int W phi`` for a bounded kernel."""
    value, _ = integrate.quad(
        lambda x: float(W(np.array([x]))[0] * np.asarray(test(np.array([x]))).reshape(-1)[0]),
        -radius,
        radius,
        points=_inner_points(points, radius),
        limit=400,
        epsabs=1e-13,
        epsrel=1e-11,
    )
    return value


@dataclass(frozen=True)
class CappedRenormalizationReport:
    """``RW_eps(phi)`` against ``int W_eps phi - C_eps phi(0)`` and against ``RW(phi)``."""

    eps: List[float]
    renormalized: List[float]
    masses: List[float]
    identity_residuals: List[float]
    limit: float
    rate: RateFit
    tolerance: float = IDENTITY_TOLERANCE

    @property
    def errors(self) -> List[float]:
        return [abs(v - self.limit) for v in self.renormalized]

    @property
    def passed(self) -> bool:
        converging = all(b <= a for a, b in zip(self.errors, self.errors[1:]))
        return max(self.identity_residuals) < self.tolerance and converging

    def to_dict(self) -> Dict:
        return {
            "eps": self.eps,
            "renormalized": self.renormalized,
            "C_eps": self.masses,
            "identity_residuals": self.identity_residuals,
            "limit": self.limit,
            "errors": self.errors,
            "rate": self.rate.to_dict(),
            "passed": self.passed,
        }


def capped_renormalization_check(
    eps_list: Sequence[float],
    W: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    test=None,
    radius: float = 1.0,
) -> CappedRenormalizationReport:
    """Check ``RW_eps = W_eps - C_eps delta_0`` and ``RW_eps(phi) -> RW(phi)``."""
    W = W or inverse_distance_kernel(radius)
    test = test if test is not None else Bump((0.1,), 0.5)
    phi0 = _origin_value(test)
    limit = renormalized_distribution(W, radius).pair(test)
    eps = sorted((float(e) for e in eps_list), reverse=True)
    renormalized, masses, residuals = [], [], []
    for e in eps:
        W_eps = capped_kernel(W, e)
        lhs = renormalized_distribution(W_eps, radius, breakpoints=(e,)).pair(test)
        mass = kernel_mass(W_eps, radius, (-e, e))
        rhs = plain_pairing(W_eps, test, radius, (-e, e, *_test_points(test))) - mass * phi0
        renormalized.append(lhs)
        masses.append(mass)
        residuals.append(abs(lhs - rhs))
        logger.info("eps=%.3g RW_eps=%.8g C_eps=%.6g", e, lhs, mass)
    report = CappedRenormalizationReport(
        eps=eps,
        renormalized=renormalized,
        masses=masses,
        identity_residuals=residuals,
        limit=limit,
        rate=fit_rate(eps, [abs(v - limit) for v in renormalized]),
    )
    return report

