"""Symbol table and renormalized-equation services."""

import logging
from typing import List

from ..algebra import Homogeneity
from ..trees import counterterm_table, generate_symbols, renormalized_rhs, substitution_identities
from . import ExperimentResult, ExperimentService
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

NEGATIVE_SYMBOLS = ["Ξ", "<3>", "<2>", "<32>", "<1>", "<31>", "<22>", "X_i<2>"]


class SymbolsService(ExperimentService):
    name = "symbols"
    description = "Symbols below a homogeneity threshold with exact homogeneities"
    parameters = ("threshold",)

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        try:
            Homogeneity.parse(config.threshold)
        except ValueError as e:
            return [f"invalid threshold '{config.threshold}': {e}"]
        return []

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        threshold = Homogeneity.parse(config.threshold)
        entries = generate_symbols(threshold)
        rows = [entry.to_dict() for entry in entries]
        checks = {}
        if threshold == Homogeneity():
            checks["negative_symbols"] = [e.name for e in entries] == NEGATIVE_SYMBOLS
        logger.info("generated %d symbols below %s", len(entries), threshold)
        return ExperimentResult(
            success=True,
            checks=checks,
            summary={"threshold": str(threshold), "count": len(entries), "symbols": rows},
            artifacts={"symbols": rows},
        )


class RenormEquationService(ExperimentService):
    name = "renorm-eq"
    description = "Symbolic check of the renormalized right-hand side and contraction identities"

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        report = renormalized_rhs()
        identities = substitution_identities()
        table = {name: str(value) for name, value in counterterm_table().items()}
        checks = {"difference_is_zero": report.passed, **identities}
        return ExperimentResult(
            success=True,
            checks=checks,
            summary={**report.to_dict(), "identities": identities, "counterterms": table},
        )
