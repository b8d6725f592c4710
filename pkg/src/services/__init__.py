"""
Experiment Service Abstraction Layer

Each CLI subcommand is an ``ExperimentService`` registered with the
``ExperimentFactory``. Services take an ``ExperimentConfig`` and return an
``ExperimentResult``; writing artifacts and choosing exit codes is left to
the driver in ``src/main.py``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Type

from .config import ExperimentConfig


@dataclass
class ExperimentResult:
    """Standardized result from an experiment run."""

    success: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    summary: Dict = field(default_factory=dict)
    artifacts: Dict[str, List[Dict]] = field(default_factory=dict)
    error_message: str = ""

    def __post_init__(self):
        self.checks = {name: bool(ok) for name, ok in self.checks.items()}
        if not self.success and not self.error_message:
            self.error_message = "Unknown experiment error"

    @property
    def passed(self) -> bool:
        return self.success and all(self.checks.values())

    @property
    def failed_checks(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


class ExperimentService(ABC):
    """Abstract base class defining the experiment service contract."""

    name: str = ""
    description: str = ""
    stochastic: bool = False
    parameters: tuple = ()
    default_samples: int = 10_000

    @abstractmethod
    def run(self, config: ExperimentConfig) -> ExperimentResult:
        """
        Execute the experiment.

        Args:
            config: Validated configuration

        Returns:
            ExperimentResult with per-check outcomes, a JSON-ready summary
            and CSV rows keyed by artifact name
        """
        pass

    def validate(self, config: ExperimentConfig) -> List[str]:
        """Problems with ``config``; empty when the run may proceed."""
        problems = []
        if self.stochastic and config.seed is None:
            problems.append(f"{self.name} is stochastic and needs an explicit --seed")
        if config.samples is not None and config.samples < 2:
            problems.append(f"samples must be at least 2, got {config.samples}")
        if config.workers < 1:
            problems.append(f"workers must be positive, got {config.workers}")
        if any(not 0 < e <= 1 for e in config.eps):
            problems.append("every eps must lie in (0, 1]")
        return problems + self.extra_problems(config)

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        return []

    def sample_count(self, config: ExperimentConfig) -> int:
        return config.samples if config.samples is not None else self.default_samples

    def get_service_info(self) -> Dict:
        return {
            "name": self.name,
            "description": self.description,
            "stochastic": self.stochastic,
            "parameters": list(self.parameters),
        }


class ExperimentFactory:
    """Factory for creating experiment services by subcommand name."""

    _services: Dict[str, Type[ExperimentService]] = {}

    @classmethod
    def register_service(cls, name: str, service_class: Type[ExperimentService]):
        """Register an experiment service implementation."""
        cls._services[name] = service_class

    @classmethod
    def create_service(cls, name: str, **kwargs) -> ExperimentService:
        """
        Create an experiment service instance.

        Raises:
            ValueError: If ``name`` is not registered
        """
        if name not in cls._services:
            available = ", ".join(cls._services.keys())
            raise ValueError(f"Unknown experiment '{name}'. Available: {available}")
        return cls._services[name](**kwargs)

    @classmethod
    def list_available_services(cls) -> List[str]:
        return list(cls._services.keys())


# Import and register available services
from .symbolic import RenormEquationService, SymbolsService  # noqa: E402
from .analysis import (  # noqa: E402
    ModelCheckService,
    ReconstructConvergenceService,
    RoughIntegrateService,
    ToyProductService,
    WaveletCheckService,
)
from .kernel import KernelCheckService  # noqa: E402
from .renormalization import (  # noqa: E402
    Pi2Service,
    RenormConstantsService,
    WickCheckService,
)

for _service in (
    SymbolsService,
    RenormEquationService,
    WaveletCheckService,
    ModelCheckService,
    ReconstructConvergenceService,
    RoughIntegrateService,
    ToyProductService,
    KernelCheckService,
    RenormConstantsService,
    Pi2Service,
    WickCheckService,
):
    ExperimentFactory.register_service(_service.name, _service)
