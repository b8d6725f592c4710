"""Renormalisation constants, Wick/chaos and squared-field Monte Carlo services."""

import logging
from typing import List

from ..renorm import (
    MOLLIFIERS,
    capped_renormalization_check,
    chaos_isometry_check,
    create_mollifier,
    divergence_report,
    enumerate_wick,
    grid_kernel,
    pi2_sweep,
    telephone_number,
)
from ..trees import counterterm_table
from . import ExperimentResult, ExperimentService
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

DEFAULT_CONSTANT_EPS = [2.0**-n for n in range(3, 9)]
DEFAULT_PI2_EPS = [2.0**-n for n in range(2, 5)]
MAX_LEGS = 6
CHAOS_TOLERANCE = 0.05


class RenormConstantsService(ExperimentService):
    name = "renorm-constants"
    description = "C1 and C2 over an eps sweep with their divergence fits"
    parameters = ("eps", "mollifier")

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        if config.mollifier not in MOLLIFIERS:
            return [f"unknown mollifier '{config.mollifier}'. Available: {', '.join(sorted(MOLLIFIERS))}"]
        return []

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        eps = config.eps or DEFAULT_CONSTANT_EPS
        report = divergence_report(eps, create_mollifier(config.mollifier))
        capped = capped_renormalization_check(eps)
        smallest = min(report.eps)
        c1, c2 = report.c1[report.eps.index(smallest)], report.c2[report.eps.index(smallest)]
        counterterms = {name: str(value) for name, value in counterterm_table(c1, c2).items()}
        summary = {
            **report.to_dict(),
            "counterterm_coefficient": [3 * a - 9 * b for a, b in zip(report.c1, report.c2)],
            "counterterms_at_smallest_eps": {"eps": smallest, "table": counterterms},
            "renormalized_distribution": capped.to_dict(),
        }
        return ExperimentResult(
            success=True,
            checks={**report.checks, "capped_renormalization": capped.passed},
            summary=summary,
            artifacts={"constants": report.rows()},
        )


class Pi2Service(ExperimentService):
    name = "pi2"
    description = "Raw and renormalised means of the squared mollified field"
    stochastic = True
    parameters = ("eps", "samples", "seed", "workers")

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        eps = config.eps or DEFAULT_PI2_EPS
        sweep = pi2_sweep(eps, samples=self.sample_count(config), seed=config.seed, workers=config.workers)
        keys = ("eps", "C1", "mean_raw", "mean_renorm", "variance", "stderr", "ratio")
        rows = [{k: r.to_dict()[k] for k in keys} for r in sweep.results]
        summary = sweep.to_dict()
        if len(sweep.results) == 1:
            summary.update({k: rows[0][k] for k in keys})
        return ExperimentResult(
            success=True,
            checks={
                "renormalized_mean_zero": all(r.checks["renormalized_mean_zero"] for r in sweep.results),
                "raw_mean_tracks_C1": all(r.checks["raw_mean_tracks_C1"] for r in sweep.results),
            },
            summary=summary,
            artifacts={"pi2": rows},
        )


class WickCheckService(ExperimentService):
    name = "wick-check"
    description = "Pairing counts against the telephone numbers and chaos isometry checks"
    stochastic = True
    parameters = ("samples", "seed")
    default_samples = 100_000

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        samples = self.sample_count(config)
        counts = [
            {"k": k, "diagrams": len(enumerate_wick(k)), "telephone": telephone_number(k)}
            for k in range(MAX_LEGS + 1)
        ]
        first = chaos_isometry_check(
            grid_kernel(lambda x: 1 + x, 8, 1),
            grid_kernel(lambda x: 2 - x, 8, 1),
            samples,
            config.seed,
        )
        second = chaos_isometry_check(
            grid_kernel(lambda x, y: 1 + x + y, 6, 2),
            grid_kernel(lambda x, y: 2 + x * y, 6, 2),
            samples,
            config.seed + 1,
        )
        cross = chaos_isometry_check(
            grid_kernel(lambda x: 1 + x, 6, 1),
            grid_kernel(lambda x, y: 2 + x * y, 6, 2),
            samples,
            config.seed + 2,
        )
        return ExperimentResult(
            success=True,
            checks={
                "pairing_counts": all(row["diagrams"] == row["telephone"] for row in counts),
                "isometry_first_chaos": first.relative_error < CHAOS_TOLERANCE,
                "isometry_second_chaos": second.relative_error < CHAOS_TOLERANCE,
                "cross_chaos_orthogonal": cross.within_stderr,
            },
            summary={
                "pairing_counts": counts,
                "samples": samples,
                "chaos": [first.to_dict(), second.to_dict(), cross.to_dict()],
            },
            artifacts={"pairings": counts},
        )
