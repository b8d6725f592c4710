"""Finite linear combinations of tree symbols with sympy coefficients."""

from __future__ import annotations

from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple

import sympy as sp

from ..algebra import Homogeneity
from .symbols import ONE, TreeSymbol, homogeneity, product, symbol_name

Coefficient = sp.Expr


class FormalSum:
    """Map symbol -> coefficient with zero coefficients never stored.

    Coefficients are sympy expressions, so scalar names such as ``phi``,
    ``C1`` or ``dphi_1`` can appear polynomially.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[TreeSymbol, object]] = None):
        self._terms: Dict[TreeSymbol, Coefficient] = {}
        for sym, c in (terms or {}).items():
            self._accumulate(sym, c)

    def _accumulate(self, sym: Optional[TreeSymbol], c) -> None:
        if sym is None:
            return
        total = sp.expand(self._terms.get(sym, sp.Integer(0)) + sp.sympify(c))
        if total == 0:
            self._terms.pop(sym, None)
        else:
            self._terms[sym] = total

    @classmethod
    def of(cls, sym: Optional[TreeSymbol], coeff=1) -> "FormalSum":
        out = cls()
        out._accumulate(sym, coeff)
        return out

    @classmethod
    def scalar(cls, coeff) -> "FormalSum":
        return cls.of(ONE, coeff)

    def items(self) -> Iterator[Tuple[TreeSymbol, Coefficient]]:
        return iter(sorted(self._terms.items(), key=lambda kv: (homogeneity(kv[0]), kv[0].key)))

    def symbols(self) -> Iterable[TreeSymbol]:
        return [s for s, _ in self.items()]

    def coefficient(self, sym: TreeSymbol) -> Coefficient:
        return self._terms.get(sym, sp.Integer(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return (self - other).is_zero()

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(self._terms)
        for s, c in other._terms.items():
            out._accumulate(s, c)
        return out

    def __neg__(self) -> "FormalSum":
        return self.scale(-1)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def scale(self, c) -> "FormalSum":
        return FormalSum({s: sp.sympify(c) * v for s, v in self._terms.items()})

    def __rmul__(self, c) -> "FormalSum":
        return self.scale(c)

    def __mul__(self, other) -> "FormalSum":
        if not isinstance(other, FormalSum):
            return self.scale(other)
        out = FormalSum()
        for s1, c1 in self._terms.items():
            for s2, c2 in other._terms.items():
                out._accumulate(product(s1, s2), c1 * c2)
        return out

    def map_terms(self, fn: Callable[[TreeSymbol], "FormalSum"]) -> "FormalSum":
        """Extend ``fn`` linearly."""
        out = FormalSum()
        for s, c in self._terms.items():
            for s2, c2 in fn(s)._terms.items():
                out._accumulate(s2, c * c2)
        return out

    def truncate(self, cap: Homogeneity, inclusive: bool = True) -> "FormalSum":
        """Keep terms with homogeneity ``<= cap`` (or ``< cap``)."""
        keep = {
            s: c
            for s, c in self._terms.items()
            if (homogeneity(s) <= cap if inclusive else homogeneity(s) < cap)
        }
        return FormalSum(keep)

    def subs(self, mapping: Mapping) -> "FormalSum":
        return FormalSum({s: c.subs(mapping) for s, c in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for s, c in self.items():
            c = sp.factor_terms(c)
            if c == 1:
                parts.append(symbol_name(s))
            elif c == -1:
                parts.append(f"-{symbol_name(s)}")
            else:
                parts.append(f"({c})*{symbol_name(s)}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"FormalSum({self})"

    def to_dict(self) -> Dict[str, str]:
        return {symbol_name(s): str(c) for s, c in self.items()}
