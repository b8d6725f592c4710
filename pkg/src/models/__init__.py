"""Concrete models, distribution proxies, test functions and the model verifier."""

from typing import Optional

import numpy as np

from .base import KAPPA_NUM, Model, ModelFactory
from .fits import RateFit, fit_rate, r_squared
from .noise import MollifiedNoiseModel, mollified_noise_model, white_noise
from .polynomial import PolynomialModel, polynomial_model, taylor_reexpansion_residual
from .proxies import (
    ZERO_PROXY,
    AnalyticFn,
    CellMeasure,
    DistributionProxy,
    GridFn,
    LinearCombination,
    WeightedProxy,
    combine,
    constant,
)
from .rough_path import (
    ROUGH_PATH_KINDS,
    HolderReport,
    RoughPath,
    chen_residual,
    export_csv,
    holder_report,
    import_csv,
    polynomial_area_closed_form,
    sample_rough_path,
)
from .rough_path_model import (
    UNIT,
    ControlledPath,
    RoughPathModel,
    area_label,
    controlled_path,
    controlled_remainder_residual,
    noise_label,
    path_label,
    rough_path_model,
)
from .testfns import (
    Bump,
    FunctionTest,
    IndicatorTest,
    MonomialWeighted,
    ScaledScalingFunction,
    bump_family,
    unit_bump,
)
from .toy import ToyLimitModel, ToySineModel, toy_label, toy_pair, toy_power, toy_structure
from .verify import (
    BoundFit,
    CorruptedGammaModel,
    GammaFit,
    ModelReport,
    VerifySpec,
    corrupt_gamma,
    scaled_distance,
    verify_model,
)


def _rough_path_builder(
    kind: str = "brownian",
    n: int = 2,
    level: int = 10,
    seed: Optional[int] = None,
    alpha: float = 0.4,
) -> RoughPathModel:
    return rough_path_model(sample_rough_path(kind, n, level, seed, alpha))


def _noise_builder(
    noise: str = "white",
    level: int = 10,
    seed: Optional[int] = None,
    max_degree: int = 1,
    alpha: float = 0.6,
) -> MollifiedNoiseModel:
    if noise == "white":
        xi = white_noise(level, seed)
    elif noise == "smooth":
        xi = AnalyticFn(lambda y: np.cos(2 * np.pi * np.asarray(y, dtype=float)) + 0.5)
    else:
        raise ValueError(f"Unknown noise '{noise}'. Available: white, smooth")
    return mollified_noise_model(xi, max_degree, alpha)


ModelFactory.register_model("polynomial", polynomial_model)
ModelFactory.register_model("rough-path", _rough_path_builder)
ModelFactory.register_model("toy-limit", lambda c=1.0: ToyLimitModel(c))
ModelFactory.register_model("toy-sine", lambda c=1.0, n=16: ToySineModel(c, n))
ModelFactory.register_model("mollified-noise", _noise_builder)

__all__ = [
    "AnalyticFn",
    "BoundFit",
    "Bump",
    "CellMeasure",
    "ControlledPath",
    "CorruptedGammaModel",
    "DistributionProxy",
    "FunctionTest",
    "GammaFit",
    "GridFn",
    "HolderReport",
    "IndicatorTest",
    "KAPPA_NUM",
    "LinearCombination",
    "Model",
    "ModelFactory",
    "ModelReport",
    "MollifiedNoiseModel",
    "MonomialWeighted",
    "PolynomialModel",
    "ROUGH_PATH_KINDS",
    "RateFit",
    "RoughPath",
    "RoughPathModel",
    "ScaledScalingFunction",
    "ToyLimitModel",
    "ToySineModel",
    "UNIT",
    "VerifySpec",
    "WeightedProxy",
    "ZERO_PROXY",
    "area_label",
    "bump_family",
    "chen_residual",
    "combine",
    "constant",
    "controlled_path",
    "controlled_remainder_residual",
    "corrupt_gamma",
    "export_csv",
    "fit_rate",
    "holder_report",
    "import_csv",
    "mollified_noise_model",
    "noise_label",
    "path_label",
    "polynomial_area_closed_form",
    "polynomial_model",
    "r_squared",
    "rough_path_model",
    "sample_rough_path",
    "scaled_distance",
    "taylor_reexpansion_residual",
    "toy_label",
    "toy_pair",
    "toy_power",
    "toy_structure",
    "unit_bump",
    "verify_model",
    "white_noise",
]
