"""
Generation of the Phi^4_3 symbol set below a homogeneity threshold.

U is the smallest set containing 1, X_i and I(XI) that is closed under
(t1, t2, t3) -> I(t1 t2 t3); the model space is spanned by XI together with
all products of three elements of U.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Set, Tuple

from ..algebra import GradedIndexSet, Homogeneity
from ..errors import SymbolGenerationError
from .symbols import (
    DIM,
    IXI,
    ONE,
    XI,
    TreeSymbol,
    factors,
    homogeneity,
    integrate,
    product,
    symbol_name,
    unit_vector,
)

logger = logging.getLogger(__name__)

MAX_SYMBOLS = 20000
MAX_ROUNDS = 64

SPATIAL_PERMUTATIONS = list(itertools.permutations((1, 2, 3)))


@dataclass(frozen=True)
class SymbolEntry:
    """One row of the symbol table; ``multiplicity`` counts spatial variants."""

    symbol: TreeSymbol
    name: str
    homogeneity: Homogeneity
    multiplicity: int = 1

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "homogeneity": str(self.homogeneity),
            "degree": float(self.homogeneity.rational_part),
            "kappa": self.homogeneity.kappa_mult,
            "multiplicity": self.multiplicity,
        }


def _inner_size(t: TreeSymbol) -> int:
    """Largest number of factors inside any integration node of ``t``."""
    best = 0
    stack = [t]
    while stack:
        s = stack.pop()
        if s.kind == "int":
            best = max(best, len(factors(s.children[0])))
        stack.extend(s.children)
    return best


def sort_key(t: TreeSymbol) -> tuple:
    return (homogeneity(t), -_inner_size(t), symbol_name(t), t.key)


def _closure_u(bound: Homogeneity) -> Set[TreeSymbol]:
    seeds = [ONE, IXI] + [unit_vector(i) for i in range(DIM)]
    u = {s for s in seeds if homogeneity(s) < bound}
    for rounds in range(MAX_ROUNDS):
        added = set()
        ordered = sorted(u, key=sort_key)
        for triple in itertools.combinations_with_replacement(ordered, 3):
            t = integrate(product(*triple))
            if t is not None and t not in u and homogeneity(t) < bound:
                added.add(t)
        if not added:
            logger.debug("U closed after %d rounds with %d symbols", rounds, len(u))
            return u
        u |= added
        if len(u) > MAX_SYMBOLS:
            break
    raise SymbolGenerationError(
        f"symbol generation did not close below {bound} "
        f"({len(u)} symbols after {MAX_ROUNDS} rounds)"
    )


def generate_basis(threshold) -> List[TreeSymbol]:
    """Every symbol of homogeneity below ``threshold``, all spatial indices kept.

    Raises:
        SymbolGenerationError: If the generation rules do not close.
    """
    threshold = Homogeneity.from_number(threshold)
    # a product of three elements of U is below the threshold only if each
    # factor lies below threshold - 2|I(XI)|
    bound_u = threshold + Homogeneity(Fraction(1), 2)
    u = _closure_u(bound_u)
    ordered = sorted(u, key=sort_key)
    w = set()
    if homogeneity(XI) < threshold:
        w.add(XI)
    for triple in itertools.combinations_with_replacement(ordered, 3):
        t = product(*triple)
        if homogeneity(t) < threshold:
            w.add(t)
        if len(w) > MAX_SYMBOLS:
            raise SymbolGenerationError(f"more than {MAX_SYMBOLS} symbols below {threshold}")
    return sorted(w, key=sort_key)


def permute_spatial(t: TreeSymbol, perm: Tuple[int, int, int]) -> TreeSymbol:
    """Relabel spatial indices: coordinate ``i`` goes to ``perm[i-1]``."""
    if t.kind == "xi":
        return t
    if t.kind == "poly":
        k = [t.k[0], 0, 0, 0]
        for i in range(1, 4):
            k[perm[i - 1]] = t.k[i]
        return TreeSymbol("poly", tuple(k))
    if t.kind == "int":
        return integrate(permute_spatial(t.children[0], perm))
    return product(*(permute_spatial(c, perm) for c in t.children))


def _orbit(t: TreeSymbol) -> Set[TreeSymbol]:
    return {permute_spatial(t, p) for p in SPATIAL_PERMUTATIONS}


def _display_name(rep: TreeSymbol, orbit_size: int) -> str:
    name = symbol_name(rep)
    if orbit_size == 3 and name.startswith("X_1") and not name.startswith("X_1^"):
        return "X_i" + name[3:]
    return name


def generate_symbols(threshold) -> List[SymbolEntry]:
    """Symbols below ``threshold`` sorted by increasing homogeneity.

    Symbols related by a permutation of the spatial coordinates are merged
    into one representative with the orbit size as multiplicity.
    """
    basis = generate_basis(threshold)
    seen: Set[TreeSymbol] = set()
    entries = []
    for t in basis:
        if t in seen:
            continue
        orbit = _orbit(t)
        seen |= orbit
        rep = max(orbit, key=lambda s: s.key)
        entries.append(
            SymbolEntry(rep, _display_name(rep, len(orbit)), homogeneity(rep), len(orbit))
        )
    entries.sort(key=lambda e: sort_key(e.symbol))
    logger.info("generated %d symbols below %s", len(entries), threshold)
    return entries


def degree_counts(threshold) -> Dict[str, int]:
    """Number of basis symbols per homogeneity, spatial variants counted."""
    counts = Counter(str(homogeneity(t)) for t in generate_basis(threshold))
    return dict(counts)


def symbol_space(threshold) -> GradedIndexSet:
    basis = generate_basis(threshold)
    return GradedIndexSet(tuple(basis), tuple(homogeneity(t) for t in basis))


def symbol_space_upto(cap) -> GradedIndexSet:
    """Basis of homogeneity ``<= cap`` (``cap`` exact, kappa terms respected)."""
    cap = Homogeneity.from_number(cap)
    # include every symbol whose homogeneity equals cap up to kappa terms
    basis = [t for t in generate_basis(cap + Homogeneity(0, 10**6)) if homogeneity(t) <= cap]
    return GradedIndexSet(tuple(basis), tuple(homogeneity(t) for t in basis))
