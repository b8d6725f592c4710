"""
Products and composition of modelled distributions.

A ``ProductTable`` is a partial map ``(tau, tau') -> {sigma: coefficient}``
with every ``sigma`` of degree ``|tau| + |tau'|``. Pairs absent from the
table are only allowed when their degree is at least the output gamma.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from ..algebra import GradedIndexSet, Homogeneity
from ..errors import ProductTableError, SectorError
from ..models import Model, fit_rate
from ..models.fits import RateFit
from ..models.testfns import Bump
from ..models.toy import TOY_LABELS, toy_label, toy_pair, toy_power
from .distribution import ModelledDistribution
from .reconstruct import reconstruct_pointwise

logger = logging.getLogger(__name__)

KAPPA = 0.01
Entry = Dict[Hashable, float]


class ProductTable:
    """Bilinear product on the basis of one structure."""

    def __init__(self, structure: GradedIndexSet, entries: Dict[Tuple[Hashable, Hashable], Entry]):
        for (a, b), image in entries.items():
            target = structure.degree(a) + structure.degree(b)
            for sigma in image:
                if structure.degree(sigma) != target:
                    raise ProductTableError(
                        f"{a} * {b} -> {sigma} breaks degree additivity ({target})"
                    )
        self.structure = structure
        self.entries = dict(entries)

    def lookup(self, a: Hashable, b: Hashable) -> Optional[Entry]:
        if (a, b) in self.entries:
            return self.entries[(a, b)]
        return self.entries.get((b, a))

    def product(self, u: np.ndarray, v: np.ndarray, gamma: Homogeneity) -> np.ndarray:
        """``u * v`` truncated to degrees below ``gamma``.

        Raises:
            ProductTableError: If a needed pair below ``gamma`` has no entry
        """
        space = self.structure
        out = np.zeros(len(space))
        nz_u = np.flatnonzero(u)
        nz_v = np.flatnonzero(v)
        for i in nz_u:
            a = space.labels[i]
            for j in nz_v:
                b = space.labels[j]
                if not space.degree(a) + space.degree(b) < gamma:
                    continue
                image = self.lookup(a, b)
                if image is None:
                    raise ProductTableError(f"no product entry for ({a}, {b})")
                for sigma, c in image.items():
                    out[space.index(sigma)] += c * u[i] * v[j]
        return out


def polynomial_product_table(structure: GradedIndexSet) -> ProductTable:
    """``X^k * X^l = X^(k+l)`` whenever the result is in the structure."""
    entries = {}
    for a in structure.labels:
        for b in structure.labels:
            k = tuple(x + y for x, y in zip(a, b))
            if k in structure:
                entries[(a, b)] = {k: 1.0}
    return ProductTable(structure, entries)


def toy_product_table(structure: GradedIndexSet) -> ProductTable:
    """``Xi^a * Xi^b = Xi^(a+b)`` for ``a + b <= 2``."""
    entries = {}
    for a in TOY_LABELS:
        for b in TOY_LABELS:
            p = toy_power(a) + toy_power(b)
            if p <= 2:
                entries[(a, b)] = {toy_label(p): 1.0}
    return ProductTable(structure, entries)


def covariance_residual(table: ProductTable, model: Model, x, y) -> float:
    """Max over table entries of ``|Gamma(a * b) - Gamma a * Gamma b|`` (entries that close)."""
    space = table.structure
    g = model.gamma(x, y)
    cap = Homogeneity(10**6)
    worst = 0.0
    for (a, b), image in table.entries.items():
        lhs = np.zeros(len(space))
        for sigma, c in image.items():
            lhs += c * g.matrix[:, space.index(sigma)]
        try:
            rhs = table.product(g.matrix[:, space.index(a)], g.matrix[:, space.index(b)], cap)
        except ProductTableError:
            continue
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def multiply(
    f1: ModelledDistribution, f2: ModelledDistribution, table: ProductTable
) -> ModelledDistribution:
    """Pointwise product with ``gamma = min(gamma1 + alpha2, gamma2 + alpha1)``, ``alpha = alpha1 + alpha2``."""
    gamma = min(f1.gamma + f2.alpha, f2.gamma + f1.alpha)
    alpha = f1.alpha + f2.alpha
    logger.debug("product of %s and %s: gamma=%s alpha=%s", f1.name, f2.name, gamma, alpha)

    def coeffs(x):
        return table.product(f1(x), f2(x), gamma)

    space = table.structure
    sector = tuple(l for l, d in zip(space.labels, space.label_degrees) if d < gamma)
    return ModelledDistribution(
        f1.model, gamma, coeffs, alpha=alpha, sector=sector, name=f"{f1.name}*{f2.name}"
    )


def _unit_label(f: ModelledDistribution) -> Hashable:
    """
    Raises:
        SectorError: If the sector of ``f`` is not function-like
    """
    space = f.model.structure
    degrees = {l: space.degree(l) for l in f.sector}
    zero = Homogeneity(0)
    if any(d < zero for d in degrees.values()):
        raise SectorError(f"sector of {f.name} has negative degrees")
    bottom = [l for l, d in degrees.items() if d == zero]
    if len(bottom) != 1:
        raise SectorError(f"sector of {f.name} needs a one-dimensional degree-0 part")
    return bottom[0]


def _derivatives(G: Union[str, sp.Expr], order: int) -> List[Callable]:
    u = sp.Symbol("u")
    expr = sp.sympify(G, locals={"u": u})
    return [sp.lambdify(u, sp.diff(expr, u, k), "numpy") for k in range(order + 1)]


def compose(
    G: Union[str, sp.Expr],
    f: ModelledDistribution,
    table: ProductTable,
    kappa: float = KAPPA,
) -> ModelledDistribution:
    """
    ``(G o f)(x) = sum_{k < gamma/alpha0} G^(k)(fbar(x))/k! * ftilde(x)^k``.

    ``G`` is a sympy expression (or string) in the variable ``u``.

    Raises:
        SectorError: If ``f`` does not live in a function-like sector
    """
    unit = _unit_label(f)
    space = f.model.structure
    positive = [space.degree(l).value(kappa) for l in f.sector if l != unit]
    alpha0 = min(positive) if positive else float("inf")
    gamma = f.gamma.value(kappa)
    terms = 0 if alpha0 == float("inf") else int(math.ceil(gamma / alpha0 - 1e-12))
    terms = max(terms, 1)
    derivs = _derivatives(G, terms)
    unit_index = space.index(unit)

    def coeffs(x):
        vec = f(x)
        fbar = vec[unit_index]
        ftilde = vec.copy()
        ftilde[unit_index] = 0.0
        power = np.zeros(len(space))
        power[unit_index] = 1.0
        out = np.zeros(len(space))
        for k in range(terms):
            out += float(derivs[k](fbar)) / math.factorial(k) * power
            power = table.product(power, ftilde, f.gamma)
        return out

    return ModelledDistribution(
        f.model, f.gamma, coeffs, alpha=Homogeneity(0), sector=f.sector, name=f"G({f.name})"
    )


def toy_modelled(model: Model, fn: str, gamma=1) -> ModelledDistribution:
    """``F = f 1 + f' Xi`` for a sympy expression ``f`` in ``y``."""
    y = sp.Symbol("y")
    expr = sp.sympify(fn, locals={"y": y})
    value = sp.lambdify(y, expr, "numpy")
    deriv = sp.lambdify(y, sp.diff(expr, y), "numpy")
    space = model.structure

    def coeffs(x):
        x = float(np.asarray(x).reshape(-1)[0])
        vec = np.zeros(len(space))
        vec[space.index("1")] = float(value(x))
        vec[space.index("Ξ")] = float(deriv(x))
        return vec

    return ModelledDistribution(model, gamma, coeffs, sector=("Ξ", "1"), name=str(expr))


@dataclass(frozen=True)
class ToyProductReport:
    c: float
    limit_residual: float
    ns: List[int]
    errors: List[float]
    fit: RateFit
    pointwise_gap: float
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return (
            self.limit_residual < self.tolerance
            and (self.fit.identically_zero or self.fit.exponent > 0)
        )

    def to_dict(self) -> Dict:
        return {
            "c": self.c,
            "passed": self.passed,
            "limit_residual": self.limit_residual,
            "ns": self.ns,
            "errors": self.errors,
            "rate": self.fit.exponent,
            "pointwise_product_gap": self.pointwise_gap,
        }


def toy_product_experiment(
    c: float,
    f1: str = "1 + y**2",
    f2: str = "y**3 - y",
    ns: Sequence[int] = (4, 8, 16, 32, 64, 128),
    points: Sequence[float] = tuple(np.linspace(-1.0, 1.0, 9)),
    center: float = 0.3,
    lam: float = 0.25,
) -> ToyProductReport:
    """Compare ``R(F1 * F2)`` on the limiting model with ``f1 f2 + c f1' f2'`` and
    measure how the sine-model pairings approach it."""
    y = sp.Symbol("y")
    e1, e2 = sp.sympify(f1, locals={"y": y}), sp.sympify(f2, locals={"y": y})
    exact = sp.lambdify(y, e1 * e2 + c * sp.diff(e1, y) * sp.diff(e2, y), "numpy")
    pointwise = sp.lambdify(y, e1 * e2, "numpy")

    limit, _ = toy_pair(c, ns[0])
    table = toy_product_table(limit.structure)
    product = multiply(toy_modelled(limit, f1), toy_modelled(limit, f2), table)
    R = reconstruct_pointwise(product)
    pts = np.asarray(points, dtype=float)
    limit_residual = float(np.max(np.abs(R.evaluate(pts) - exact(pts))))
    pointwise_gap = float(np.max(np.abs(R.evaluate(pts) - pointwise(pts))))

    test = Bump((center,), lam)
    target = R.pair(test)
    errors = []
    for n in ns:
        _, sine = toy_pair(c, n)
        prod_n = multiply(toy_modelled(sine, f1), toy_modelled(sine, f2), table)
        errors.append(abs(reconstruct_pointwise(prod_n).pair(test) - target))
        logger.info("toy product n=%d error %.3e", n, errors[-1])
    fit = fit_rate([1.0 / n for n in ns], errors)
    return ToyProductReport(c, limit_residual, list(ns), errors, fit, pointwise_gap)
