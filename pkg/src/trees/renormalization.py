"""
Renormalization maps L1, L2 and M = exp(-C1 L1 - C2 L2).

L1 contracts a pair I(XI) I(XI) sitting in a product node; L2 contracts
I(<2>) I(XI) I(XI), where the I(<2>) factor may be any integrated factor
whose inner product contains <2>. Both sum over all occurrences, recursing
through integration.
"""

from __future__ import annotations

import logging
from math import comb
from typing import Callable, Dict, Tuple

import numpy as np
import sympy as sp

from ..algebra import GradedIndexSet, GradedMap, Homogeneity
from .formal import FormalSum
from .generate import symbol_space_upto
from .symbols import (
    IXI,
    TreeSymbol,
    bracket,
    factors,
    integrate,
    noise_power,
    product,
)

logger = logging.getLogger(__name__)

C1, C2 = sp.symbols("C1 C2")

TopRule = Callable[[Tuple[TreeSymbol, ...]], FormalSum]


def _remove_noise_lines(fs, count: int):
    out = list(fs)
    for _ in range(count):
        out.remove(IXI)
    return out


def _top_l1(fs: Tuple[TreeSymbol, ...]) -> FormalSum:
    c = fs.count(IXI)
    if c < 2:
        return FormalSum()
    return FormalSum.of(product(*_remove_noise_lines(fs, 2)), comb(c, 2))


def _top_l2(fs: Tuple[TreeSymbol, ...]) -> FormalSum:
    out = FormalSum()
    for pos, f in enumerate(fs):
        if f.kind != "int" or f == IXI:
            continue
        inner = factors(f.children[0])
        c_in = inner.count(IXI)
        others = fs[:pos] + fs[pos + 1 :]
        c_out = others.count(IXI)
        if c_in < 2 or c_out < 2:
            continue
        leftover = _remove_noise_lines(inner, 2)
        rest = _remove_noise_lines(others, 2)
        out = out + FormalSum.of(
            product(*rest, *leftover), comb(c_in, 2) * comb(c_out, 2)
        )
    return out


def _substitute(t: TreeSymbol, top: TopRule) -> FormalSum:
    if t.kind in ("xi", "poly"):
        return FormalSum()
    if t.kind == "int":
        inner = _substitute(t.children[0], top)
        return FormalSum({integrate(s): c for s, c in inner.items() if integrate(s)})
    fs = t.children
    out = top(fs)
    for pos, f in enumerate(fs):
        if f.kind != "int":
            continue
        others = fs[:pos] + fs[pos + 1 :]
        for s, c in _substitute(f, top).items():
            out = out + FormalSum.of(product(*others, s), c)
    return out


def apply_L1(s: FormalSum) -> FormalSum:
    """Sum over all ways of contracting a pair of I(XI) into 1."""
    return s.map_terms(lambda t: _substitute(t, _top_l1))


def apply_L2(s: FormalSum) -> FormalSum:
    """Sum over all ways of contracting I(<2>) I(XI)^2 into 1."""
    return s.map_terms(lambda t: _substitute(t, _top_l2))


def apply_M(s: FormalSum, c1=C1, c2=C2, cap=Homogeneity()) -> FormalSum:
    """Action of exp(-c1 L1 - c2 L2) modulo terms of homogeneity above ``cap``."""
    cap = Homogeneity.from_number(cap)
    total = s.truncate(cap)
    term = total
    n = 0
    while not term.is_zero():
        n += 1
        term = (apply_L1(term).scale(-c1) + apply_L2(term).scale(-c2)).truncate(cap)
        term = term.scale(sp.Rational(1, n))
        total = total + term
    return total


def _matrix_of(space: GradedIndexSet, op: Callable[[FormalSum], FormalSum]) -> GradedMap:
    images: Dict[TreeSymbol, Dict[TreeSymbol, object]] = {}
    for t in space.labels:
        image = op(FormalSum.of(t))
        images[t] = {s: c for s, c in image.items() if s in space}
    return GradedMap.from_images(space, images, exact=True)


def L_matrices(cap=Homogeneity()) -> Tuple[GradedMap, GradedMap]:
    space = symbol_space_upto(cap)
    return _matrix_of(space, apply_L1), _matrix_of(space, apply_L2)


def _exp_nilpotent(a: GradedMap) -> GradedMap:
    ident = GradedMap.identity(a.domain, exact=True)
    total = ident.matrix.copy()
    term = ident
    for n in range(1, len(a.domain) + 1):
        term = term @ a
        if all(sp.expand(c) == 0 for c in term.matrix.ravel()):
            break
        total = total + term.matrix * sp.Rational(1, sp.factorial(n))
    total = np.vectorize(sp.expand, otypes=[object])(total)
    return GradedMap(a.domain, a.domain, total, True)


def renorm_map(c1=C1, c2=C2, cap=Homogeneity()) -> GradedMap:
    """Matrix of M = exp(-c1 L1 - c2 L2) on the symbols of homogeneity <= cap."""
    l1, l2 = L_matrices(cap)
    gen = GradedMap(
        l1.domain,
        l1.domain,
        np.vectorize(sp.expand, otypes=[object])(
            l1.matrix * (-sp.sympify(c1)) - l2.matrix * sp.sympify(c2)
        ),
        True,
    )
    logger.debug("renormalization map on %d symbols", len(l1.domain))
    return _exp_nilpotent(gen)


def counterterm_table(c1=C1, c2=C2, cap=Homogeneity()) -> Dict[str, FormalSum]:
    """Correction ``M tau - tau`` for the symbols that receive counterterms."""
    table = {}
    for tau in (noise_power(2), noise_power(3), bracket(2, 2), bracket(3, 2)):
        s = FormalSum.of(tau)
        correction = apply_M(s, c1, c2, cap) - s
        table[str(tau)] = correction
    return table
