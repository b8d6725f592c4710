"""Phi^4_3 symbol algebra: symbols, generation, renormalization and expansion."""

from .expansion import (
    DPHI,
    PHI,
    RenormalizedEquationReport,
    picard_expand,
    picard_step,
    renormalized_rhs,
    rhs_expand,
    substitution_identities,
)
from .formal import FormalSum
from .generate import (
    SymbolEntry,
    degree_counts,
    generate_basis,
    generate_symbols,
    symbol_space,
    symbol_space_upto,
)
from .renormalization import (
    C1,
    C2,
    L_matrices,
    apply_L1,
    apply_L2,
    apply_M,
    counterterm_table,
    renorm_map,
)
from .symbols import (
    IXI,
    ONE,
    XI,
    TreeSymbol,
    bracket,
    homogeneity,
    integrate,
    noise_power,
    poly,
    product,
    symbol_name,
    unit_vector,
)

__all__ = [
    "C1",
    "C2",
    "DPHI",
    "FormalSum",
    "IXI",
    "L_matrices",
    "ONE",
    "PHI",
    "RenormalizedEquationReport",
    "SymbolEntry",
    "TreeSymbol",
    "XI",
    "apply_L1",
    "apply_L2",
    "apply_M",
    "bracket",
    "counterterm_table",
    "degree_counts",
    "generate_basis",
    "generate_symbols",
    "homogeneity",
    "integrate",
    "noise_power",
    "picard_expand",
    "picard_step",
    "poly",
    "product",
    "renorm_map",
    "renormalized_rhs",
    "rhs_expand",
    "substitution_identities",
    "symbol_name",
    "symbol_space",
    "symbol_space_upto",
    "unit_vector",
]
