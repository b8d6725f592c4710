"""
Abstract integration against a decomposed kernel.

``J(x) tau`` and ``N f(x)`` are Taylor coefficients of convolutions with
``K = sum_n K_n``, computed piece by piece for every multi-index ``k`` with
``|k|_s`` below the target degree. ``AdmissibleModel`` adds a symbol
``I(tau)`` for every non-polynomial label of a base model, and ``K_operator``
lifts a modelled distribution ``f`` to ``K f = I f + J f + N f``.

Models live on the line or under the parabolic scaling of the heat split;
kernel derivatives are pure, of order at most two along one axis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from ..algebra import GradedIndexSet, GradedMap, Homogeneity
from ..errors import KernelError
from ..modelled import ModelledDistribution, reconstruct, reconstruct_pointwise
from ..models import AnalyticFn, Bump, GridFn, Model, MollifiedNoiseModel, PolynomialModel
from ..models.base import KAPPA_NUM
from ..models.fits import RateFit, fit_rate
from ..models.noise import POLY
from ..models.proxies import DistributionProxy, LinearCombination, combine, composite_nodes
from .decompose import KernelPiece, SingularKernel, moment_exponents

logger = logging.getLogger(__name__)

INTEGRATED = "I"
DEFAULT_RECONSTRUCTION_LEVEL = 10
SCHAUDER_LEVEL = 6
DIRECT_PANELS_2D = 40
MAX_DERIVATIVE_ORDER = 2

Point = Union[float, Tuple[float, ...]]
MultiIndex = Tuple[int, ...]


def _point(x, dim: int) -> Point:
    flat = np.asarray(x, dtype=float).reshape(-1)
    if dim == 1:
        return float(flat[0])
    return tuple(flat.tolist())


def _factorial(k: MultiIndex) -> int:
    return math.prod(math.factorial(e) for e in k)


def _pure_derivative(k: Union[int, MultiIndex]) -> Tuple[int, int]:
    """``(axis, order)`` of a derivative acting along a single axis."""
    if isinstance(k, int):
        return 0, k
    axes = [i for i, e in enumerate(k) if e]
    if not axes:
        return 0, 0
    if len(axes) > 1:
        raise KernelError(f"mixed kernel derivative D^{k} is not available")
    return axes[0], k[axes[0]]


@dataclass(frozen=True)
class KernelTest:
    """``y -> D^k K_n(x - y)`` as a test function."""

    piece: KernelPiece
    x: Point
    k: Union[int, MultiIndex] = 0

    @property
    def dim(self) -> int:
        return self.piece.profile.dim

    @property
    def bounds(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        return tuple((xi - hi, xi - lo) for xi, (lo, hi) in zip(x, self.piece.bounds()))

    def __call__(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self.dim == 1:
            z = float(self.x) - points.reshape(-1)
        else:
            z = np.asarray(self.x, dtype=float)[None, :] - points.reshape(-1, self.dim)
        axis, order = _pure_derivative(self.k)
        if order == 0:
            return self.piece(z)
        return self.piece.derivative(z, axis, order)


def integrated_label(tau: Hashable) -> Tuple[str, Hashable]:
    return (INTEGRATED, tau)


def polynomial_labels(model: Model) -> Dict[Hashable, MultiIndex]:
    """Map the polynomial labels ``X^k`` of a model to their multi-index ``k``.

    Raises:
        KernelError: If the model has no recognised polynomial block
    """
    if isinstance(model, AdmissibleModel):
        return dict(model.poly)
    if isinstance(model, MollifiedNoiseModel):
        return {(POLY, k): (k,) for k in range(model.max_degree + 1)}
    if isinstance(model, PolynomialModel):
        return {label: tuple(label) for label in model.labels}
    raise KernelError(f"model {model.name} has no recognised polynomial block")


def taylor_indices(degree: Homogeneity, scaling: Sequence[int], what: str) -> List[MultiIndex]:
    """Multi-indices ``k`` with ``|k|_s < degree``, by scaled degree.

    Raises:
        KernelError: On an integer degree or when a mixed derivative or one of
            order above two is needed
    """
    if degree.is_integer():
        raise KernelError(f"{what} has integer degree {degree}")
    value = degree.value(KAPPA_NUM)
    if value <= 0:
        return []
    scaling = tuple(scaling)

    def scaled(k):
        return sum(s * e for s, e in zip(scaling, k))

    indices = sorted(
        (k for k in moment_exponents(scaling, int(math.floor(value))) if scaled(k) < value),
        key=lambda k: (scaled(k), k),
    )
    for k in indices:
        try:
            _, order = _pure_derivative(k)
        except KernelError:
            raise KernelError(f"{what} needs the mixed kernel derivative D^{k}") from None
        if order > MAX_DERIVATIVE_ORDER:
            raise KernelError(
                f"{what} needs kernel derivatives of order {order}; at most {MAX_DERIVATIVE_ORDER} are available"
            )
    return indices


def dyadic_terms(
    proxy: DistributionProxy, kernel: SingularKernel, x: Point, indices: Sequence[MultiIndex]
) -> np.ndarray:
    """``terms[n, j] = proxy(D^k K_n(x - .))`` for ``k = indices[j]``."""
    terms = np.zeros((len(kernel.pieces), len(indices)))
    for n, piece in enumerate(kernel.pieces):
        for j, k in enumerate(indices):
            terms[n, j] = proxy.pair(KernelTest(piece, x, k))
    return terms


def _tail_fit(kernel: SingularKernel, terms: np.ndarray) -> List[RateFit]:
    scales = [p.radius for p in kernel.pieces]
    return [fit_rate(scales, terms[:, k]) for k in range(terms.shape[1])]


@dataclass(frozen=True)
class TaylorCoefficients:
    """``sum_k c_k X^k / k!`` with the dyadic terms that produced each ``c_k``."""

    values: np.ndarray
    terms: np.ndarray
    tails: List[RateFit] = field(default_factory=list)
    indices: List[MultiIndex] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "indices": [list(k) for k in self.indices],
            "coefficients": self.values.tolist(),
            "tail_exponents": [None if t.identically_zero else t.exponent for t in self.tails],
        }


def J_operator(x, tau: Hashable, model: Model, kernel: SingularKernel) -> TaylorCoefficients:
    """
    ``c_k = sum_n (Pi_x tau)(D^k K_n(x - .))`` for ``|k|_s < |tau| + beta``.

    Polynomial labels give zero since every piece annihilates polynomials.

    Raises:
        KernelError: If ``|tau| + beta`` is an integer
    """
    poly = polynomial_labels(model)
    if tau in poly:
        return TaylorCoefficients(np.zeros(0), np.zeros((len(kernel.pieces), 0)))
    degree = model.structure.degree(tau) + Homogeneity.from_number(kernel.beta)
    indices = taylor_indices(degree, kernel.scaling, f"I({tau})")
    x = _point(x, kernel.dim)
    terms = dyadic_terms(model.pi(x, tau), kernel, x, indices)
    return TaylorCoefficients(terms.sum(axis=0), terms, _tail_fit(kernel, terms), indices)


def N_operator(
    f: ModelledDistribution,
    kernel: SingularKernel,
    x,
    reconstruction: Optional[DistributionProxy] = None,
) -> TaylorCoefficients:
    """
    ``c_k = sum_n (Rf - Pi_x f(x))(D^k K_n(x - .))`` for ``|k|_s < gamma + beta``.

    Raises:
        KernelError: If ``gamma <= 0`` or ``gamma + beta`` is an integer
    """
    if not Homogeneity(0) < f.gamma:
        raise KernelError(f"N needs gamma > 0, got {f.gamma}")
    indices = taylor_indices(f.gamma + Homogeneity.from_number(kernel.beta), kernel.scaling, "K f")
    if reconstruction is None:
        reconstruction = default_reconstruction(f)
    x = _point(x, kernel.dim)
    local = f.model.pi_vector(x, f(x))
    difference = LinearCombination(((1.0, reconstruction), (-1.0, local)))
    terms = dyadic_terms(difference, kernel, x, indices)
    return TaylorCoefficients(terms.sum(axis=0), terms, _tail_fit(kernel, terms), indices)


def default_reconstruction(f: ModelledDistribution, level: int = DEFAULT_RECONSTRUCTION_LEVEL):
    if f.model.is_continuous:
        return reconstruct_pointwise(f)
    return reconstruct(f, level)


@dataclass(frozen=True, eq=False)
class ConvolvedProxy(DistributionProxy):
    """``K * mu`` for a proxy ``mu``, evaluated piece by piece."""

    base: DistributionProxy
    kernel: SingularKernel

    def _at(self, x: Point) -> float:
        return sum(self.base.pair(KernelTest(p, x)) for p in self.kernel.pieces)

    def evaluate(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kernel.dim == 1:
            return np.array([self._at(float(v)) for v in y.reshape(-1)]).reshape(y.shape)
        return np.array([self._at(tuple(v)) for v in y.reshape(-1, self.kernel.dim)])

    def pair(self, test) -> float:
        if self.kernel.dim != 1:
            raise KernelError("pairing K * mu with a test function is implemented in one dimension")
        lo, hi = test.bounds[0]
        nodes, weights = composite_nodes(lo, hi, 16)
        return float(np.dot(weights, self.evaluate(nodes) * test(nodes)))


class AdmissibleModel(Model):
    """
    Base model extended by ``I(tau)`` of degree ``|tau| + beta``.

    ``Pi_x I tau = K * Pi_x tau - J(x) tau`` and
    ``Gamma_xy I tau = I Gamma_xy tau + (J(x) Gamma_xy - Gamma_xy J(y)) tau``.
    """

    name = "admissible"

    def __init__(self, base: Model, kernel: SingularKernel):
        if base.dim != kernel.dim or tuple(base.scaling) != tuple(kernel.scaling):
            raise KernelError(
                f"base scaling {tuple(base.scaling)} does not match kernel scaling {tuple(kernel.scaling)}"
            )
        self.base = base
        self.kernel = kernel
        self.poly = polynomial_labels(base)
        beta = Homogeneity.from_number(kernel.beta)
        pairs = [(l, base.structure.degree(l)) for l in base.labels]
        for tau in base.labels:
            if tau in self.poly:
                continue
            degree = base.structure.degree(tau) + beta
            if degree.is_integer():
                raise KernelError(f"I({tau}) would have integer degree {degree}")
            pairs.append((integrated_label(tau), degree))
        super().__init__(GradedIndexSet.from_pairs(pairs), base.scaling)
        self.is_continuous = base.is_continuous
        self._jets: Dict[Tuple[Point, Hashable], np.ndarray] = {}

    def is_integrated(self, label: Hashable) -> bool:
        return label in self.structure and label not in self.base.structure

    def polynomial_vector(self, indices: Sequence[MultiIndex], values: np.ndarray, what: str) -> np.ndarray:
        """``sum_k values_k X^k / k!`` over the base structure."""
        by_index = {k: label for label, k in self.poly.items()}
        vec = np.zeros(len(self.base.structure))
        for k, c in zip(indices, values):
            if k not in by_index:
                raise KernelError(f"base structure lacks X^{k} needed for {what}")
            vec[self.base.structure.index(by_index[k])] = c / _factorial(k)
        return vec

    def jet(self, x, tau: Hashable) -> np.ndarray:
        """``J(x) tau`` as a vector over the base structure."""
        x = _point(x, self.dim)
        key = (x, tau)
        if key not in self._jets:
            coeffs = J_operator(x, tau, self.base, self.kernel)
            self._jets[key] = self.polynomial_vector(coeffs.indices, coeffs.values, f"J({tau})")
        return self._jets[key]

    def embed(self, base_vector: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self.structure))
        for i, label in enumerate(self.base.labels):
            out[self.structure.index(label)] = base_vector[i]
        return out

    def pi(self, x, label: Hashable) -> DistributionProxy:
        if not self.is_integrated(label):
            return self.base.pi(x, label)
        tau = label[1]
        x = _point(x, self.dim)
        jet = self.jet(x, tau)
        polys = [self.base.pi(x, l) for l in self.base.labels]
        taylor = combine(-jet, polys)
        return ConvolvedProxy(self.base.pi(x, tau), self.kernel) + taylor

    def gamma(self, x, y) -> GradedMap:
        x = _point(x, self.dim)
        y = _point(y, self.dim)
        g = self.base.gamma(x, y)
        images: Dict[Hashable, Dict[Hashable, float]] = {}
        for label in self.base.labels:
            images[label] = dict(g.image(label))
        for label in self.labels:
            if not self.is_integrated(label):
                continue
            tau = label[1]
            column = g.matrix[:, self.base.structure.index(tau)]
            image: Dict[Hashable, float] = {}
            correction = -g.apply(self.jet(y, tau))
            for i, sigma in enumerate(self.base.labels):
                c = float(column[i])
                if c == 0.0 or sigma in self.poly:
                    continue
                image[integrated_label(sigma)] = c
                correction = correction + c * self.jet(x, sigma)
            for i, sigma in enumerate(self.base.labels):
                if correction[i] != 0.0:
                    image[sigma] = image.get(sigma, 0.0) + float(correction[i])
            images[label] = image
        return GradedMap.from_images(self.structure, images)


def K_operator(
    f: ModelledDistribution,
    model: AdmissibleModel,
    reconstruction: Optional[DistributionProxy] = None,
) -> ModelledDistribution:
    """
    ``K f = I f + J f + N f`` in ``D^(gamma + beta)``.

    Raises:
        KernelError: If ``f`` does not live on the base of ``model`` or the
            polynomial block is too small
    """
    if f.model is not model.base:
        raise KernelError("f must be modelled on the base of the admissible model")
    beta = Homogeneity.from_number(model.kernel.beta)
    gamma = f.gamma + beta
    indices = taylor_indices(gamma, model.kernel.scaling, "K f")
    present = set(model.poly.values())
    missing = [k for k in indices if k not in present]
    if missing:
        raise KernelError(f"structure lacks X^k for k in {missing} (|k|_s < {gamma})")
    if reconstruction is None:
        reconstruction = default_reconstruction(f)
    base = model.base

    def coeffs(x):
        x = _point(x, model.dim)
        v = f(x)
        out = np.zeros(len(model.structure))
        jet = np.zeros(len(base.structure))
        for i, tau in enumerate(base.labels):
            if v[i] == 0.0 or tau in model.poly:
                continue
            out[model.structure.index(integrated_label(tau))] = v[i]
            jet += v[i] * model.jet(x, tau)
        n_coeffs = N_operator(f, model.kernel, x, reconstruction)
        jet += model.polynomial_vector(n_coeffs.indices, n_coeffs.values, "N f")
        return out + model.embed(jet)

    wanted = set(indices)
    sector = tuple(integrated_label(t) for t in f.sector if t not in model.poly) + tuple(
        l for l, k in model.poly.items() if k in wanted
    )
    alpha = f.alpha + beta
    if model.poly and Homogeneity(0) < alpha:
        alpha = Homogeneity(0)
    return ModelledDistribution(model, gamma, coeffs, alpha=alpha, sector=sector, name=f"K({f.name})")


@dataclass(frozen=True)
class SchauderReport:
    nodes: int
    pointwise_residual: float
    pairing_residual: float
    tolerance: float = 1e-4

    @property
    def passed(self) -> bool:
        return self.pairing_residual < self.tolerance

    def to_dict(self) -> Dict:
        return {
            "nodes": self.nodes,
            "pointwise_residual": self.pointwise_residual,
            "pairing_residual": self.pairing_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def convolve_direct(kernel: SingularKernel, fn: Callable, x) -> float:
    """
    ``(K * fn)(x)`` piece by piece.

    On the line ``fn`` takes a scalar and each piece is integrated adaptively;
    in two dimensions ``fn`` takes an ``(N, 2)`` array of points and each
    piece is integrated by tensor Gauss-Legendre on its support box.
    """
    if kernel.dim == 1:
        x = float(x)
        total = 0.0
        for piece in kernel.pieces:
            r = piece.radius
            value, _ = integrate.quad(
                lambda y: float(fn(y)) * float(piece(np.array([x - y]))[0]),
                x - r,
                x + r,
                points=(x - 0.25 * r, x, x + 0.25 * r),
                limit=200,
                epsabs=1e-12,
                epsrel=1e-10,
            )
            total += value
        return total
    x = _point(x, kernel.dim)
    total = 0.0
    for piece in kernel.pieces:
        test = KernelTest(piece, x)
        axes = [composite_nodes(lo, hi, DIRECT_PANELS_2D) for lo, hi in test.bounds]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.multiply.outer(axes[0][1], axes[1][1]).ravel()
        total += float(np.dot(weights, np.asarray(fn(points), dtype=float) * test(points)))
    return total


def schauder_identity_check(
    f: ModelledDistribution,
    model: AdmissibleModel,
    direct: Callable[[float], float],
    window: Tuple[float, float] = (0.25, 0.75),
    level: int = SCHAUDER_LEVEL,
    lambdas: Sequence[float] = (2.0**-3, 2.0**-4),
    tolerance: float = 1e-4,
) -> SchauderReport:
    """
    Compare ``R K f`` with ``K * R f`` on the dyadic nodes of ``window``.

    ``direct`` evaluates ``R f`` pointwise; the right-hand side is computed
    with adaptive quadrature and both sides are paired with bumps through
    their grid samples. The pairing residual is relative to the largest
    pairing of ``K * R f`` and only sees nodal values, so the node spacing
    needs to resolve the bumps and nothing finer.

    Raises:
        KernelError: Outside one dimension
    """
    if model.dim != 1:
        raise KernelError("the Schauder identity check runs on the line")
    h = 2.0**-level
    lo, hi = window
    nodes = lo + h * np.arange(int(round((hi - lo) / h)) + 1)
    Kf = K_operator(f, model, AnalyticFn(np.vectorize(direct)))
    lhs = reconstruct_pointwise(Kf).evaluate(nodes)
    rhs = np.array([convolve_direct(model.kernel, direct, float(x)) for x in nodes])
    pointwise = float(np.max(np.abs(lhs - rhs)))
    left, right = GridFn(lhs, lo, h), GridFn(rhs, lo, h)
    scale, worst = 0.0, 0.0
    for lam in lambdas:
        for c in np.linspace(lo + lam, hi - lam, 5):
            bump = Bump((float(c),), lam)
            a, b = left.pair(bump), right.pair(bump)
            scale = max(scale, abs(b))
            worst = max(worst, abs(a - b))
    pairing = worst / scale if scale > 0 else worst
    logger.info("Schauder identity on %d nodes: pointwise %.2e, pairing %.2e", len(nodes), pointwise, pairing)
    return SchauderReport(len(nodes), pointwise, pairing, tolerance)


@dataclass(frozen=True)
class JetConvolutionReport:
    points: int
    indices: List[MultiIndex]
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def to_dict(self) -> Dict:
        return {
            "points": self.points,
            "indices": [list(k) for k in self.indices],
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def jet_convolution_check(
    f: ModelledDistribution,
    model: AdmissibleModel,
    derivatives: Mapping[MultiIndex, Callable],
    points: Sequence,
    tolerance: float = 1e-4,
) -> JetConvolutionReport:
    """
    Compare every polynomial coefficient of ``K f`` with ``K * D^k g / k!``.

    ``f`` is the Taylor jet of ``g = derivatives[0]`` on a polynomial base and
    ``derivatives`` maps each multi-index to ``D^k g``, vectorised over
    points. The residual is relative to the largest direct value.

    Raises:
        KernelError: If the base is not polynomial or a derivative is missing
    """
    if not isinstance(model.base, PolynomialModel):
        raise KernelError("the jet convolution check needs a polynomial base model")
    zero = (0,) * model.dim
    indices = taylor_indices(f.gamma + Homogeneity.from_number(model.kernel.beta), model.kernel.scaling, "K f")
    absent = [k for k in indices if k not in derivatives]
    if zero not in derivatives or absent:
        raise KernelError(f"derivatives missing for {absent or [zero]}")
    Kf = K_operator(f, model, AnalyticFn(derivatives[zero], model.dim))
    by_index = {k: label for label, k in model.poly.items()}
    scale, worst = 0.0, 0.0
    for x in points:
        x = _point(x, model.dim)
        v = Kf(x)
        for k in indices:
            got = float(v[model.structure.index(by_index[k])])
            want = convolve_direct(model.kernel, derivatives[k], x) / _factorial(k)
            scale = max(scale, abs(want))
            worst = max(worst, abs(got - want))
    residual = worst / scale if scale > 0 else worst
    logger.info("jet convolution on %d points, %d indices: residual %.2e", len(points), len(indices), residual)
    return JetConvolutionReport(len(points), list(indices), residual, tolerance)
