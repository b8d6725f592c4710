"""
Tree symbols for the dynamic Phi^4_3 structure.

Symbols are built from the noise ``XI``, monomials ``X^k`` over the parabolic
coordinates (t, x1, x2, x3), abstract integration ``integrate`` and
commutative products. Constructors return canonical forms; ``None`` stands
for the zero symbol (for instance the integral of a polynomial).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

from ..algebra import Homogeneity

DIM = 4  # parabolic coordinates (t, x1, x2, x3)
PARABOLIC_SCALING = (2, 1, 1, 1)

NOISE_HOMOGENEITY = Homogeneity(Fraction(-5, 2), -1)
INTEGRATION_GAIN = Homogeneity(2)


@dataclass(frozen=True)
class TreeSymbol:
    """One canonical symbol.

    ``kind`` is ``"xi"``, ``"poly"``, ``"int"`` or ``"prod"``. Polynomials carry
    their multi-index in ``k``; integrals have one child; products carry a
    sorted tuple of at least two non-unit factors, of which at most one is a
    polynomial.
    """

    kind: str
    k: Tuple[int, ...] = ()
    children: Tuple["TreeSymbol", ...] = ()

    @property
    def key(self) -> tuple:
        return _key(self)

    def __lt__(self, other: "TreeSymbol") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return symbol_name(self)

    def __repr__(self) -> str:
        return f"TreeSymbol({symbol_name(self)})"


@lru_cache(maxsize=None)
def _key(t: TreeSymbol) -> tuple:
    if t.kind == "xi":
        return (0,)
    if t.kind == "poly":
        return (1, t.k)
    if t.kind == "int":
        return (2, _key(t.children[0]))
    return (3, tuple(_key(c) for c in t.children))


XI = TreeSymbol("xi")
ONE = TreeSymbol("poly", (0,) * DIM)


def poly(k: Tuple[int, ...]) -> TreeSymbol:
    k = tuple(int(x) for x in k)
    if len(k) != DIM or any(x < 0 for x in k):
        raise ValueError(f"invalid multi-index {k}")
    return TreeSymbol("poly", k)


def unit_vector(i: int) -> TreeSymbol:
    """``X_i`` with ``i = 0`` for time and ``1..3`` for space."""
    k = [0] * DIM
    k[i] = 1
    return poly(tuple(k))


def integrate(t: Optional[TreeSymbol]) -> Optional[TreeSymbol]:
    """Abstract integration; vanishes on the zero symbol and on polynomials."""
    if t is None or t.kind == "poly":
        return None
    return TreeSymbol("int", children=(t,))


def product(*factors: Optional[TreeSymbol]) -> Optional[TreeSymbol]:
    """Canonical commutative product of ``factors``."""
    flat = []
    k = [0] * DIM
    for f in factors:
        if f is None:
            return None
        if f.kind == "prod":
            parts = f.children
        else:
            parts = (f,)
        for p in parts:
            if p.kind == "poly":
                k = [a + b for a, b in zip(k, p.k)]
            else:
                flat.append(p)
    if any(k):
        flat.append(TreeSymbol("poly", tuple(k)))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return TreeSymbol("prod", children=tuple(sorted(flat, key=_key)))


def factors(t: TreeSymbol) -> Tuple[TreeSymbol, ...]:
    """Non-unit factors of ``t`` (empty for the unit symbol)."""
    if t.kind == "prod":
        return t.children
    if t == ONE:
        return ()
    return (t,)


def parabolic_degree(k: Tuple[int, ...]) -> int:
    return sum(s * x for s, x in zip(PARABOLIC_SCALING, k))


@lru_cache(maxsize=None)
def homogeneity(t: TreeSymbol) -> Homogeneity:
    """Homogeneity: noise -5/2-kappa, integration adds 2, products add."""
    if t.kind == "xi":
        return NOISE_HOMOGENEITY
    if t.kind == "poly":
        return Homogeneity(parabolic_degree(t.k))
    if t.kind == "int":
        return homogeneity(t.children[0]) + INTEGRATION_GAIN
    total = Homogeneity()
    for c in t.children:
        total = total + homogeneity(c)
    return total


IXI = integrate(XI)


def noise_power(m: int) -> TreeSymbol:
    """``<m>``: the product of ``m`` copies of I(XI)."""
    return product(*([IXI] * m)) if m else ONE


def bracket(a: int, b: int) -> Optional[TreeSymbol]:
    """``<ab>``: I(<a>) times ``<b>``."""
    return product(integrate(noise_power(a)), noise_power(b))


def _pure_power(t: TreeSymbol) -> Optional[int]:
    fs = factors(t)
    if fs and all(f == IXI for f in fs):
        return len(fs)
    return None


def _poly_name(k: Tuple[int, ...]) -> str:
    labels = ("t", "1", "2", "3")
    parts = []
    for lab, e in zip(labels, k):
        if e == 1:
            parts.append(f"X_{lab}")
        elif e > 1:
            parts.append(f"X_{lab}^{e}")
    return "".join(parts) or "1"


@lru_cache(maxsize=None)
def symbol_name(t: TreeSymbol) -> str:
    """Graphical shorthand: ``<3>``, ``<32>``, ``X_1<2>``, or a nested form."""
    if t.kind == "xi":
        return "Ξ"
    if t.kind == "poly":
        return _poly_name(t.k)
    m = _pure_power(t)
    if m is not None:
        return f"<{m}>"
    fs = factors(t)
    polys = [f for f in fs if f.kind == "poly"]
    rest = [f for f in fs if f.kind != "poly"]
    prefix = _poly_name(polys[0].k) if polys else ""
    body = None
    if rest:
        ints = [f for f in rest if f != IXI]
        b = len(rest) - len(ints)
        if len(ints) == 1 and ints[0].kind == "int":
            inner = _pure_power(ints[0].children[0])
            if inner is not None and inner < 10 and b < 10:
                body = f"<{inner}{b}>"
        if body is None and not ints:
            body = f"<{b}>"
        if body is None:
            pieces = []
            for f in rest:
                if f.kind == "int":
                    pieces.append(f"I({symbol_name(f.children[0])})")
                else:
                    pieces.append(symbol_name(f))
            body = "·".join(pieces)
    return prefix + (body or "")
