"""
Renormalisation constants of the mollified heat kernel in 3+1 dimensions.

``C1(eps) = int K_eps^2`` diverges like ``1/eps`` and
``C2(eps) = 2 int K Q_eps^2`` like ``log(1/eps)``. Both are computed through
exact heat-semigroup identities, leaving only one-dimensional (or, for a
time-mollified kernel, one two-dimensional) quadratures:

* ``int G(a, x) G(b, x) dx = (4 pi (a + b))^{-3/2}``;
* ``Q_eps(t, x) = erf(|x| / 2 sqrt(|t| + 2 eps^2)) / (8 pi |x|)``;
* ``int_0^inf exp(-s^2) erf(q s)^2 ds = arctan(q^2 / sqrt(1 + 2 q^2)) / sqrt(pi)``.

The kernel is the heat kernel restricted to ``0 < t <= T``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from ..models.fits import RateFit, fit_rate, r_squared
from ..models.testfns import unit_bump

logger = logging.getLogger(__name__)

HORIZON = 1.0
HEAT_NORM = (4.0 * math.pi) ** -1.5
# 2 (8 pi)^{-3/2}: leading 1/eps coefficient of C1 for pure spatial heat mollification
HEAT_LEADING = 2.0 * (8.0 * math.pi) ** -1.5
TIME_PROFILES = ("none", "bump")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return eps


@dataclass(frozen=True)
class Mollifier:
    """
    Space-time mollifier ``rho(u, y) = b(u) G(1, y)`` on parabolic space-time.

    The spatial factor is the heat kernel at unit time, so mollifying at scale
    ``eps`` advances the heat semigroup by ``eps^2``. The time factor ``b`` is
    either a Dirac mass (``"none"``) or the unit bump on ``[-width, width]``.
    Rescaling follows ``delta_eps(t, x) = eps^-5 rho(t / eps^2, x / eps)``.
    """

    time_profile: str = "none"
    width: float = 1.0
    name: str = "heat"

    def __post_init__(self):
        if self.time_profile not in TIME_PROFILES:
            raise ValueError(
                f"Unknown time profile '{self.time_profile}'. Available: {', '.join(TIME_PROFILES)}"
            )
        if self.width <= 0:
            raise ValueError(f"width must be positive, got {self.width}")

    def time_factor(self, u) -> np.ndarray:
        if self.time_profile == "none":
            raise ValueError("a Dirac time profile has no density")
        return unit_bump(np.asarray(u, dtype=float) / self.width) / self.width

    @staticmethod
    def space_factor(r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return HEAT_NORM * np.exp(-(r**2) / 4.0)

    def density(self, t, r, eps: float) -> np.ndarray:
        """``delta_eps(t, x)`` with ``r = |x|``; only for time-mollified profiles."""
        t, r = np.asarray(t, dtype=float), np.asarray(r, dtype=float)
        return eps**-5 * self.time_factor(t / eps**2) * self.space_factor(r / eps)

    def mass(self) -> float:
        """``int rho`` by quadrature; one up to quadrature error."""
        space, _ = integrate.quad(
            lambda r: 4.0 * math.pi * r * r * HEAT_NORM * math.exp(-r * r / 4.0), 0.0, np.inf
        )
        if self.time_profile == "none":
            return space
        t_mass, _ = integrate.quad(
            lambda u: float(self.time_factor(np.array([u]))[0]), -self.width, self.width, epsabs=1e-13
        )
        return space * t_mass

    @property
    def leading_coefficient(self) -> float:
        """``a_rho`` with ``C1(eps) = a_rho / eps + O(1)``."""
        if self.time_profile == "none":
            return HEAT_LEADING
        return _bump_leading(self.width)

    def effective_eps(self, eps: float) -> float:
        """Spatial-only cutoff producing the same leading ``1/eps`` term in ``C1``."""
        return eps * HEAT_LEADING / self.leading_coefficient

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "time_profile": self.time_profile,
            "width": self.width,
            "leading_coefficient": self.leading_coefficient,
        }


@lru_cache(maxsize=None)
def _bump_leading(width: float) -> float:
    """``(4 pi)^{-3/2} int int b(u) b(v) (|u - v| + 2)^{-1/2}`` over ``v < u``, doubled."""
    b = Mollifier("bump", width, "tmp")

    def integrand(v, u):
        pair = b.time_factor(np.array([u, v]))
        return float(pair[0] * pair[1]) * (u - v + 2.0) ** -0.5

    value, _ = integrate.dblquad(
        integrand, -width, width, lambda u: -width, lambda u: u, epsabs=1e-11, epsrel=1e-9
    )
    return HEAT_NORM * 2.0 * value


MOLLIFIERS: Dict[str, Callable[[], Mollifier]] = {
    "heat": lambda: Mollifier("none", 1.0, "heat"),
    "heat-bump": lambda: Mollifier("bump", 1.0, "heat-bump"),
    "heat-wide-bump": lambda: Mollifier("bump", 2.0, "heat-wide-bump"),
}


def create_mollifier(name: str) -> Mollifier:
    if name not in MOLLIFIERS:
        raise ValueError(f"Unknown mollifier '{name}'. Available: {', '.join(sorted(MOLLIFIERS))}")
    return MOLLIFIERS[name]()


def C1_constant(eps: float, mollifier: Optional[Mollifier] = None, horizon: float = HORIZON) -> float:
    """
    ``C1(eps) = int K_eps(z)^2 dz``.

    The ``1/eps`` part is exact for the given mollifier; the horizon tail
    ``(4 pi)^{-3/2} (2 T + 2 eps^2)^{-1/2}`` is that of spatial mollification.
    """
    eps = _check_eps(eps)
    mollifier = mollifier or create_mollifier("heat")
    tail = HEAT_NORM * (2.0 * horizon + 2.0 * eps**2) ** -0.5
    return mollifier.leading_coefficient / eps - tail


def _c2_integrand(t: float, eps: float) -> float:
    q2 = t / (t + 2.0 * eps**2)
    return math.atan(q2 / math.sqrt(1.0 + 2.0 * q2)) / t


def C2_constant(
    eps: float,
    mollifier: Optional[Mollifier] = None,
    horizon: float = HORIZON,
    method: str = "exact",
) -> float:
    """
    ``C2(eps) = 2 int K(z) Q_eps(z)^2 dz``.

    ``method="exact"`` integrates ``(32 pi^3)^{-1} arctan(q^2 / sqrt(1 + 2 q^2)) / t``
    with ``q^2 = t / (t + 2 eps^2)`` over ``(0, T]``. ``method="linear"`` uses
    ``Q ~ t G``, giving ``2 * 3^{-3/2} (4 pi)^{-3} log(T / eps^2)``. A time
    mollifier enters through its effective cutoff.
    """
    eps = _check_eps(eps)
    mollifier = mollifier or create_mollifier("heat")
    eff = mollifier.effective_eps(eps)
    if method == "linear":
        return 2.0 * 3.0**-1.5 * (4.0 * math.pi) ** -3 * math.log(horizon / eff**2)
    if method != "exact":
        raise ValueError(f"Unknown method '{method}'. Available: exact, linear")
    value, _ = integrate.quad(
        _c2_integrand,
        0.0,
        horizon,
        args=(eff,),
        points=[min(2.0 * eff**2, 0.5 * horizon)],
        limit=200,
        epsabs=1e-13,
        epsrel=1e-11,
    )
    return value / (32.0 * math.pi**3)


def C2_log_coefficient() -> float:
    """Limit of ``dC2 / dlog(1/eps)``: ``2 (pi / 6) / (32 pi^3)``."""
    return 2.0 * (math.pi / 6.0) / (32.0 * math.pi**3)


@dataclass(frozen=True)
class DivergenceFit:
    """Least squares ``value ~ c1 / eps + c_log * log(eps) + c3``."""

    c1: float
    c_log: float
    c3: float
    r_squared: float

    def to_dict(self) -> Dict:
        return {"c1": self.c1, "c_log": self.c_log, "c3": self.c3, "r_squared": self.r_squared}


def fit_divergence(eps: Sequence[float], values: Sequence[float]) -> DivergenceFit:
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    design = np.column_stack([1.0 / eps, np.log(eps), np.ones_like(eps)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return DivergenceFit(*(float(c) for c in coef), r_squared(None, values, design))


@dataclass(frozen=True)
class DivergenceReport:
    mollifier: Mollifier
    eps: List[float]
    c1: List[float]
    c2: List[float]
    c1_rate: RateFit
    c2_log_r_squared: float
    c1_fit: DivergenceFit
    c2_fit: DivergenceFit
    timings: List[float] = field(default_factory=list)
    rate_slack: float = 0.15
    r_squared_floor: float = 0.98

    @property
    def c1_slope(self) -> float:
        """Slope of ``log C1`` against ``log(1/eps)``."""
        return -self.c1_rate.exponent

    @property
    def c2_increments(self) -> List[float]:
        """``C2(eps_{i+1}) - C2(eps_i)``, constant for dyadic sweeps under a log law."""
        return [b - a for a, b in zip(self.c2, self.c2[1:])]

    @property
    def checks(self) -> Dict[str, bool]:
        return {
            "c1_rate": abs(self.c1_slope - 1.0) <= self.rate_slack,
            "c2_log_law": self.c2_log_r_squared > self.r_squared_floor,
            "c1_monotone": all(a < b for a, b in zip(self.c1, self.c1[1:])),
            "c2_monotone": all(a < b for a, b in zip(self.c2, self.c2[1:])),
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def rows(self) -> List[Dict]:
        return [{"eps": e, "C1": a, "C2": b} for e, a, b in zip(self.eps, self.c1, self.c2)]

    def to_dict(self) -> Dict:
        return {
            "mollifier": self.mollifier.to_dict(),
            "horizon": HORIZON,
            "rows": self.rows(),
            "c1_slope": self.c1_slope,
            "c1_fit": self.c1_fit.to_dict(),
            "c2_log_r_squared": self.c2_log_r_squared,
            "c2_fit": self.c2_fit.to_dict(),
            "c2_increments": self.c2_increments,
            "c2_log_coefficient_limit": C2_log_coefficient(),
            "checks": self.checks,
            "passed": self.passed,
        }


def divergence_report(
    eps_list: Sequence[float],
    mollifier: Optional[Mollifier] = None,
    method: str = "exact",
) -> DivergenceReport:
    """Tabulate both constants over ``eps_list`` (sorted decreasing) and fit their laws."""
    mollifier = mollifier or create_mollifier("heat")
    eps = sorted((float(e) for e in eps_list), reverse=True)
    c1, c2, timings = [], [], []
    for e in eps:
        start = time.perf_counter()
        c1.append(C1_constant(e, mollifier))
        c2.append(C2_constant(e, mollifier, method=method))
        timings.append(time.perf_counter() - start)
        logger.info("eps=%.3g C1=%.6g C2=%.6g (%.3fs)", e, c1[-1], c2[-1], timings[-1])
    report = DivergenceReport(
        mollifier=mollifier,
        eps=eps,
        c1=c1,
        c2=c2,
        c1_rate=fit_rate(eps, c1),
        c2_log_r_squared=r_squared(np.log(1.0 / np.asarray(eps)), c2),
        c1_fit=fit_divergence(eps, c1),
        c2_fit=fit_divergence(eps, c2),
        timings=timings,
    )
    if not report.passed:
        logger.warning("divergence checks failed: %s", report.checks)
    return report
