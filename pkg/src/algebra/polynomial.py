"""Polynomial regularity structure: monomials X^k and their re-expansion maps."""

from __future__ import annotations

import itertools
from math import comb
from typing import List, Sequence, Tuple

import numpy as np
import sympy as sp

from .graded import GradedIndexSet, GradedMap
from .homogeneity import Homogeneity

MultiIndex = Tuple[int, ...]


def scaled_degree(k: MultiIndex, scaling: Sequence[int]) -> int:
    return sum(s * ki for s, ki in zip(scaling, k))


def monomials(d: int, max_degree: int, scaling: Sequence[int] = None) -> List[MultiIndex]:
    """All multi-indices with scaled degree at most ``max_degree``."""
    scaling = tuple(scaling or (1,) * d)
    out = [
        k
        for k in itertools.product(range(max_degree + 1), repeat=d)
        if scaled_degree(k, scaling) <= max_degree
    ]
    return sorted(out, key=lambda k: (scaled_degree(k, scaling), tuple(-x for x in k)))


def polynomial_space(
    d: int, max_degree: int, scaling: Sequence[int] = None
) -> GradedIndexSet:
    scaling = tuple(scaling or (1,) * d)
    ks = monomials(d, max_degree, scaling)
    return GradedIndexSet(
        tuple(ks), tuple(Homogeneity(scaled_degree(k, scaling)) for k in ks)
    )


def polynomial_gamma(space: GradedIndexSet, h, exact: bool = False) -> GradedMap:
    """Re-expansion ``X^k -> (X - h)^k`` on the monomial basis ``space``.

    ``h`` is the shift ``y - x``; for ``exact=True`` its entries may be sympy
    expressions.
    """
    h = tuple(h) if np.ndim(h) or isinstance(h, (tuple, list)) else (h,)
    n = len(space)
    if exact:
        m = np.empty((n, n), dtype=object)
        m[:] = sp.Integer(0)
    else:
        m = np.zeros((n, n))
    for j, k in enumerate(space.labels):
        for l in itertools.product(*(range(ki + 1) for ki in k)):
            coeff = 1
            for ki, li, hi in zip(k, l, h):
                coeff = coeff * comb(ki, li) * (-hi) ** (ki - li)
            i = space.index(tuple(l))
            if exact:
                m[i, j] = sp.expand(m[i, j] + sp.sympify(coeff))
            else:
                m[i, j] += float(coeff)
    return GradedMap(space, space, m, exact)


def evaluate_monomial(k: MultiIndex, point) -> float:
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return float(np.prod(point ** np.asarray(k)))
