"""
Dyadic decomposition of singular kernels.

A kernel ``k`` with a singularity of order ``beta`` at the origin is cut by
the annular partition ``chi_n = psi(2^n rho) - psi(2^(n+1) rho)`` into pieces
supported in ``rho <= 2^-n``. Each piece then has a bump-weighted polynomial
subtracted so that its moments of scaled degree ``<= N`` vanish.

Points are arrays of shape ``(m,)`` in one dimension and ``(m, 2)`` with
columns ``(t, x)`` under the parabolic scaling ``(2, 1)``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy as sp

from ..errors import KernelError
from ..models import AnalyticFn
from ..models.fits import RateFit, fit_rate
from ..models.proxies import composite_nodes

logger = logging.getLogger(__name__)

QUAD_PANELS = 48
BOUND_SAMPLES = 801
BOUND_TOLERANCE = 0.1


def _tail(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _tail_prime(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos]) / u[pos] ** 2
    return out


def _tail_second(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    v = u[pos]
    out[pos] = np.exp(-1.0 / v) * (1.0 / v**4 - 2.0 / v**3)
    return out


def _step(u: np.ndarray) -> np.ndarray:
    a, b = _tail(u), _tail(1.0 - u)
    return a / (a + b)


def _step_prime(u: np.ndarray) -> np.ndarray:
    a, b = _tail(u), _tail(1.0 - u)
    da, db = _tail_prime(u), _tail_prime(1.0 - u)
    return (da * b + a * db) / (a + b) ** 2


def _step_second(u: np.ndarray) -> np.ndarray:
    a, b = _tail(u), _tail(1.0 - u)
    da, db = _tail_prime(u), _tail_prime(1.0 - u)
    dda, ddb = _tail_second(u), _tail_second(1.0 - u)
    total = a + b
    d_total = da - db
    first = (da * b + a * db) / total**2
    return (dda * total - a * (dda + ddb)) / total**2 - 2.0 * d_total * first / total


def cutoff(r: np.ndarray) -> np.ndarray:
    """Smooth ``psi`` with ``psi = 1`` on ``r <= 1/2`` and ``psi = 0`` on ``r >= 1``."""
    return _step(2.0 - 2.0 * np.asarray(r, dtype=float))


def cutoff_prime(r: np.ndarray) -> np.ndarray:
    return -2.0 * _step_prime(2.0 - 2.0 * np.asarray(r, dtype=float))


def cutoff_second(r: np.ndarray) -> np.ndarray:
    return 4.0 * _step_second(2.0 - 2.0 * np.asarray(r, dtype=float))


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def _bump_prime(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1.0
    v = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - v**2)) * (-2.0 * v / (1.0 - v**2) ** 2)
    return out


def _bump_second(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1.0
    v = u[inside]
    q = 1.0 - v**2
    g1 = -2.0 * v / q**2
    g2 = -2.0 / q**2 - 8.0 * v**2 / q**3
    out[inside] = np.exp(-1.0 / q) * (g1**2 + g2)
    return out


def _monomial_bump_derivative(u: np.ndarray, e: int, width: float, order: int) -> np.ndarray:
    """``(d/du)^order [u^e b(u / width)]`` for ``order <= 2``."""
    mono = u**e
    bump = _bump(u / width)
    if order == 0:
        return mono * bump
    d_mono = e * u ** (e - 1) if e > 0 else np.zeros_like(u)
    d_bump = _bump_prime(u / width) / width
    if order == 1:
        return d_mono * bump + mono * d_bump
    dd_mono = e * (e - 1) * u ** (e - 2) if e > 1 else np.zeros_like(u)
    dd_bump = _bump_second(u / width) / width**2
    return dd_mono * bump + 2.0 * d_mono * d_bump + mono * dd_bump


def _drop_deltas(expr: sp.Expr) -> sp.Expr:
    # only evaluated away from the origin
    return expr.replace(lambda e: isinstance(e, sp.DiracDelta), lambda e: sp.S.Zero)


@dataclass(frozen=True)
class KernelProfile:
    """A kernel given symbolically, homogeneous of order ``beta - |s|``.

    ``expr`` is a sympy expression in ``x`` (one dimension) or in ``t, x``
    (parabolic scaling); it is only evaluated away from the origin.
    """

    name: str
    expr: sp.Expr
    variables: Tuple[sp.Symbol, ...]
    beta: float
    scaling: Tuple[int, ...]
    causal: bool = False
    _fns: Dict[object, Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        fns = {-1: sp.lambdify(self.variables, self.expr, "numpy")}
        for axis, v in enumerate(self.variables):
            first = sp.diff(self.expr, v)
            fns[axis] = sp.lambdify(self.variables, first, "numpy")
            fns[("d2", axis)] = sp.lambdify(self.variables, _drop_deltas(sp.diff(first, v)), "numpy")
        object.__setattr__(self, "_fns", fns)

    @property
    def dim(self) -> int:
        return len(self.scaling)

    @property
    def effective_dim(self) -> int:
        return sum(self.scaling)

    def _call(self, key, z: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            if self.dim == 1:
                values = self._fns[key](z)
            else:
                values = self._fns[key](z[:, 0], z[:, 1])
        values = np.broadcast_to(np.asarray(values, dtype=float), (len(z),)).copy()
        if self.causal:
            first = z if self.dim == 1 else z[:, 0]
            values[first <= 0] = 0.0
        return values

    def value(self, z: np.ndarray) -> np.ndarray:
        return self._call(-1, z)

    def derivative(self, z: np.ndarray, axis: int) -> np.ndarray:
        return self._call(axis, z)

    def second_derivative(self, z: np.ndarray, axis: int) -> np.ndarray:
        return self._call(("d2", axis), z)


def riesz_profile(beta: float = 0.5) -> KernelProfile:
    """``|x|^(beta - 1)`` on the line."""
    x = sp.Symbol("x", real=True)
    b = sp.nsimplify(beta)
    return KernelProfile("riesz", sp.Abs(x) ** (b - 1), (x,), float(beta), (1,))


def heat_profile() -> KernelProfile:
    """Heat kernel ``exp(-x^2/4t)/sqrt(4 pi t)`` on ``t > 0`` in ``1+1`` dimensions."""
    t, x = sp.symbols("t x", real=True)
    expr = sp.exp(-(x**2) / (4 * t)) / sp.sqrt(4 * sp.pi * t)
    return KernelProfile("heat", expr, (t, x), 2.0, (2, 1), causal=True)


def heaviside_profile(beta: float = 1.0) -> KernelProfile:
    """``1_{x > 0} x^(beta - 1)``, the kernel of fractional integration on the line."""
    x = sp.Symbol("x", positive=True)
    b = sp.nsimplify(beta)
    return KernelProfile("heaviside", x ** (b - 1), (x,), float(beta), (1,), causal=True)


PROFILES: Dict[str, Callable[..., KernelProfile]] = {
    "riesz": riesz_profile,
    "heat": heat_profile,
    "heaviside": heaviside_profile,
}


def create_profile(name: str, **kwargs) -> KernelProfile:
    if name not in PROFILES:
        available = ", ".join(sorted(PROFILES))
        raise ValueError(f"Unknown kernel profile: {name}. Available: {available}")
    return PROFILES[name](**kwargs)


def _as_points(z, dim: int) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if dim == 1:
        return z.reshape(-1)
    return z.reshape(-1, dim)


def scaled_norm(z: np.ndarray, scaling: Tuple[int, ...]) -> np.ndarray:
    """Smooth ``s``-homogeneous norm: ``|x|`` or ``(t^2 + x^4)^(1/4)``."""
    if len(scaling) == 1:
        return np.abs(z)
    return (z[:, 0] ** 2 + z[:, 1] ** 4) ** 0.25


def scaled_norm_gradient(z: np.ndarray, scaling: Tuple[int, ...], axis: int) -> np.ndarray:
    if len(scaling) == 1:
        return np.sign(z)
    rho = scaled_norm(z, scaling)
    with np.errstate(divide="ignore", invalid="ignore"):
        if axis == 0:
            g = z[:, 0] / (2.0 * rho**3)
        else:
            g = z[:, 1] ** 3 / rho**3
    return np.where(rho > 0, g, 0.0)


def scaled_norm_second(z: np.ndarray, scaling: Tuple[int, ...], axis: int) -> np.ndarray:
    """Second derivative of ``scaled_norm`` along ``axis``, away from the origin."""
    if len(scaling) == 1:
        return np.zeros(len(z))
    rho = scaled_norm(z, scaling)
    with np.errstate(divide="ignore", invalid="ignore"):
        if axis == 0:
            g = 1.0 / (2.0 * rho**3) - 3.0 * z[:, 0] ** 2 / (4.0 * rho**7)
        else:
            g = 3.0 * z[:, 1] ** 2 / rho**3 - 3.0 * z[:, 1] ** 6 / rho**7
    return np.where(rho > 0, g, 0.0)


def moment_exponents(scaling: Tuple[int, ...], order: int) -> List[Tuple[int, ...]]:
    """Multi-indices ``k`` with scaled degree ``sum s_i k_i <= order``."""
    ranges = [range(order // s + 1) for s in scaling]
    return [k for k in itertools.product(*ranges) if sum(s * e for s, e in zip(scaling, k)) <= order]


class KernelPiece:
    """``K_n = k chi_n - sum_m c_m Z^m B(Z)`` with ``Z`` the rescaled point."""

    def __init__(self, profile: KernelProfile, n: int, order: int):
        self.profile = profile
        self.n = n
        self.order = order
        self.exponents = moment_exponents(profile.scaling, order)
        self.center = np.array([0.5 if profile.causal else 0.0] + [0.0] * (profile.dim - 1))
        self.widths = np.array([0.25 if profile.causal else 0.5] + [0.5] * (profile.dim - 1))
        self.coeffs = self._correction()

    @property
    def radius(self) -> float:
        return 2.0**-self.n

    def bounds(self) -> List[Tuple[float, float]]:
        """Support box in real coordinates."""
        out = []
        for axis, s in enumerate(self.profile.scaling):
            r = 2.0 ** (-self.n * s)
            lo = 0.0 if self.profile.causal and axis == 0 else -r
            out.append((lo, r))
        return out

    def _rescale(self, z: np.ndarray) -> np.ndarray:
        factors = np.array([2.0 ** (self.n * s) for s in self.profile.scaling])
        if self.profile.dim == 1:
            return z * factors[0]
        return z * factors[None, :]

    def _chi(self, rho: np.ndarray) -> np.ndarray:
        return cutoff(2.0**self.n * rho) - cutoff(2.0 ** (self.n + 1) * rho)

    def _chi_prime(self, rho: np.ndarray) -> np.ndarray:
        return 2.0**self.n * cutoff_prime(2.0**self.n * rho) - 2.0 ** (self.n + 1) * cutoff_prime(
            2.0 ** (self.n + 1) * rho
        )

    def _chi_second(self, rho: np.ndarray) -> np.ndarray:
        return 4.0**self.n * cutoff_second(2.0**self.n * rho) - 4.0 ** (self.n + 1) * cutoff_second(
            2.0 ** (self.n + 1) * rho
        )

    def _cols(self, Z: np.ndarray) -> np.ndarray:
        return Z[:, None] if self.profile.dim == 1 else Z

    def _weight(self, Z: np.ndarray) -> np.ndarray:
        cols = self._cols(Z)
        out = np.ones(len(cols))
        for i in range(self.profile.dim):
            out = out * _bump((cols[:, i] - self.center[i]) / self.widths[i])
        return out

    def _monomials(self, Z: np.ndarray) -> np.ndarray:
        cols = self._cols(Z) - self.center[None, :]
        return np.stack(
            [np.prod(cols ** np.array(k)[None, :], axis=1) for k in self.exponents], axis=1
        )

    def _cutoff_part(self, z: np.ndarray) -> np.ndarray:
        rho = scaled_norm(z, self.profile.scaling)
        chi = self._chi(rho)
        out = np.zeros(len(rho))
        live = chi != 0.0
        if live.any():
            out[live] = self.profile.value(z[live]) * chi[live]
        return out

    def _correction(self) -> np.ndarray:
        """Solve the Gram system that removes the low moments of the cutoff part."""
        Z, w = self.reference_quadrature()
        z = self._unscale(Z)
        basis = self._monomials(Z)
        weight = self._weight(Z)
        gram = basis.T @ (basis * (w * weight)[:, None])
        rhs = basis.T @ (w * self._cutoff_part(z))
        return np.linalg.solve(gram, rhs)

    def _unscale(self, Z: np.ndarray) -> np.ndarray:
        factors = np.array([2.0 ** (-self.n * s) for s in self.profile.scaling])
        if self.profile.dim == 1:
            return Z * factors[0]
        return Z * factors[None, :]

    def reference_quadrature(self, panels: int = QUAD_PANELS) -> Tuple[np.ndarray, np.ndarray]:
        """Tensor Gauss-Legendre nodes on the rescaled support ``rho(Z) <= 1``."""
        box = [(0.0, 1.0) if self.profile.causal and i == 0 else (-1.0, 1.0) for i in range(self.profile.dim)]
        axes = [composite_nodes(lo, hi, panels) for lo, hi in box]
        if self.profile.dim == 1:
            return axes[0]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        Z = np.stack([g.ravel() for g in grids], axis=1)
        w = np.multiply.outer(axes[0][1], axes[1][1]).ravel()
        return Z, w

    def __call__(self, z) -> np.ndarray:
        z = _as_points(z, self.profile.dim)
        Z = self._rescale(z)
        corr = self._monomials(Z) @ self.coeffs * self._weight(Z)
        return self._cutoff_part(z) - corr

    def derivative(self, z, axis: int = 0, order: int = 1) -> np.ndarray:
        """
        ``(d/dz_axis)^order K_n`` from the analytic derivatives of profile,
        cutoff and correction bump.

        Raises:
            KernelError: If ``order`` is not 1 or 2
        """
        if order not in (1, 2):
            raise KernelError(f"kernel derivatives of order {order} are not available")
        z = _as_points(z, self.profile.dim)
        scaling = self.profile.scaling
        rho = scaled_norm(z, scaling)
        grad = scaled_norm_gradient(z, scaling, axis)
        chi = self._chi(rho)
        dchi = self._chi_prime(rho) * grad
        ddchi = np.zeros(len(rho))
        if order == 2:
            ddchi = self._chi_second(rho) * grad**2 + self._chi_prime(rho) * scaled_norm_second(z, scaling, axis)
        out = np.zeros(len(rho))
        live = (chi != 0.0) | (dchi != 0.0) | (ddchi != 0.0)
        if live.any():
            zl = z[live]
            if order == 1:
                out[live] = self.profile.derivative(zl, axis) * chi[live] + self.profile.value(zl) * dchi[live]
            else:
                out[live] = (
                    self.profile.second_derivative(zl, axis) * chi[live]
                    + 2.0 * self.profile.derivative(zl, axis) * dchi[live]
                    + self.profile.value(zl) * ddchi[live]
                )
        cols = self._cols(self._rescale(z)) - self.center[None, :]
        others = np.ones(len(rho))
        for i in range(self.profile.dim):
            if i != axis:
                others = others * _bump(cols[:, i] / self.widths[i])
        d_corr = np.zeros(len(rho))
        for c, k in zip(self.coeffs, self.exponents):
            rest = np.ones(len(rho))
            for i in range(self.profile.dim):
                if i != axis:
                    rest = rest * cols[:, i] ** k[i]
            d_corr += c * rest * others * _monomial_bump_derivative(cols[:, axis], k[axis], self.widths[axis], order)
        factor = 2.0 ** (self.n * scaling[axis] * order)
        return out - factor * d_corr

    def normalized_moments(self, panels: int = QUAD_PANELS) -> np.ndarray:
        """Moments ``int K_n(z) Z^m dZ`` divided by ``2^(n(|s| - beta))``."""
        Z, w = self.reference_quadrature(panels)
        values = self(self._unscale(Z))
        scale = 2.0 ** (self.n * (self.profile.effective_dim - self.profile.beta))
        return (self._monomials(Z).T @ (w * values)) / scale

    def sup_norm(self, axis: Optional[int] = None, samples: int = BOUND_SAMPLES) -> float:
        """``sup |D^k K_n|`` on a tensor grid of the support."""
        if self.profile.dim == 1:
            z = np.linspace(-self.radius, self.radius, samples)
        else:
            side = int(math.sqrt(samples)) + 1
            (t_lo, t_hi), (x_lo, x_hi) = self.bounds()
            tt, xx = np.meshgrid(np.linspace(t_lo, t_hi, side), np.linspace(x_lo, x_hi, side), indexing="ij")
            z = np.stack([tt.ravel(), xx.ravel()], axis=1)
        values = self(z) if axis is None else self.derivative(z, axis)
        return float(np.max(np.abs(values)))


@dataclass(frozen=True)
class BoundCheck:
    derivative: str
    scaled_degree: int
    expected: float
    fit: RateFit

    @property
    def exponent(self) -> float:
        return -self.fit.exponent

    @property
    def passed(self) -> bool:
        return abs(self.exponent - self.expected) <= BOUND_TOLERANCE

    def to_dict(self) -> Dict:
        return {
            "derivative": self.derivative,
            "scaled_degree": self.scaled_degree,
            "expected": self.expected,
            "fitted": self.exponent,
            "passed": self.passed,
        }


@dataclass
class SingularKernel:
    profile: KernelProfile
    order: int
    pieces: List[KernelPiece]

    @property
    def beta(self) -> float:
        return self.profile.beta

    @property
    def scaling(self) -> Tuple[int, ...]:
        return self.profile.scaling

    @property
    def dim(self) -> int:
        return self.profile.dim

    def __call__(self, z) -> np.ndarray:
        z = _as_points(z, self.dim)
        out = np.zeros(len(z))
        for piece in self.pieces:
            out += piece(z)
        return out

    def derivative(self, z, axis: int = 0, order: int = 1) -> np.ndarray:
        z = _as_points(z, self.dim)
        out = np.zeros(len(z))
        for piece in self.pieces:
            out += piece.derivative(z, axis, order)
        return out

    def moment_residuals(self, panels: int = QUAD_PANELS) -> List[float]:
        return [float(np.max(np.abs(p.normalized_moments(panels)))) for p in self.pieces]

    def bound_checks(self) -> List[BoundCheck]:
        """Fit ``sup |D^k K_n|`` against ``2^-n`` for ``k = 0`` and each first derivative."""
        scales = [p.radius for p in self.pieces]
        d = self.profile.effective_dim
        cases = [("value", None, 0)] + [
            (f"d/d{v}", axis, self.scaling[axis]) for axis, v in enumerate(self.profile.variables)
        ]
        out = []
        for label, axis, degree in cases:
            sups = [p.sup_norm(axis) for p in self.pieces]
            fit = fit_rate(scales, sups)
            out.append(BoundCheck(label, degree, d - self.beta + degree, fit))
        return out

    def report(self) -> Dict:
        residuals = self.moment_residuals()
        bounds = self.bound_checks()
        return {
            "profile": self.profile.name,
            "beta": self.beta,
            "scaling": list(self.scaling),
            "moment_order": self.order,
            "pieces": [
                {"n": p.n, "radius": p.radius, "moment_residual": r}
                for p, r in zip(self.pieces, residuals)
            ],
            "bounds": [b.to_dict() for b in bounds],
            "passed": all(b.passed for b in bounds),
        }


def decompose_kernel(
    profile: KernelProfile, order: int, n_levels: int = 8, check: bool = False
) -> SingularKernel:
    """
    Cut ``profile`` into ``n_levels`` moment-corrected dyadic pieces.

    Args:
        profile: The kernel and its singularity order
        order: Moments of scaled degree up to ``order`` are removed
        n_levels: Number of pieces ``K_0 .. K_{n_levels - 1}``
        check: Raise if a fitted scaling exponent misses ``|s| - beta + |k|``

    Raises:
        KernelError: If the level count is not positive, or ``check`` is set
            and the singularity order does not match ``beta``
    """
    if n_levels < 1:
        raise KernelError("need at least one dyadic piece")
    if order < 0:
        raise KernelError("moment order must be non-negative")
    pieces = [KernelPiece(profile, n, order) for n in range(n_levels)]
    kernel = SingularKernel(profile, order, pieces)
    logger.debug("decomposed %s kernel into %d pieces (moments <= %d)", profile.name, n_levels, order)
    if check:
        for b in kernel.bound_checks():
            if not b.passed:
                raise KernelError(
                    f"{profile.name} kernel: {b.derivative} bound exponent {b.exponent:.3f} "
                    f"differs from {b.expected:.3f}"
                )
    return kernel


def moment_order(gamma: float, beta: float) -> int:
    """Smallest ``N >= gamma + beta`` plus one."""
    return int(math.ceil(gamma + beta)) + 1


@dataclass(frozen=True)
class HeatSplit:
    kernel: SingularKernel
    remainder: AnalyticFn
    full: KernelProfile

    def partition_residual(self, z) -> float:
        """``max |K + R - G|`` over points away from the origin."""
        z = _as_points(z, 2)
        total = self.kernel(z) + self.remainder.evaluate(z)
        return float(np.max(np.abs(total - self.full.value(z))))


def split_heat_kernel(order: int = 4, n_levels: int = 6) -> HeatSplit:
    """``G = K + R`` with ``K`` the compactly supported singular part in ``1+1`` dimensions.

    ``R`` is smooth outside the ball of radius ``2^-n_levels``.
    """
    profile = heat_profile()
    kernel = decompose_kernel(profile, order, n_levels)

    def remainder(z):
        z = _as_points(z, 2)
        full = np.zeros(len(z))
        away = scaled_norm(z, profile.scaling) > 0
        full[away] = profile.value(z[away])
        return full - kernel(z)

    return HeatSplit(kernel, AnalyticFn(remainder, 2), profile)
