"""
Configuration management for experiment services.

An ``ExperimentConfig`` is assembled from, in priority order, command-line
flags, a plain-text ``key = value`` file and the defaults below. The only
environment variable is ``RS_OUTPUT_DIR``, the base directory for relative
output paths.
"""

import logging
import os
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

from ..errors import ConfigError

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "RS_OUTPUT_DIR"
FORMATS = ("text", "json")

_INT_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
_DYADIC = re.compile(r"^\s*2\^(-?\d+)\s*$")
_DYADIC_RANGE = re.compile(r"^\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*$")


@dataclass
class ExperimentConfig:
    """Parameters of one CLI run; unset lists fall back to per-service defaults."""

    command: str = ""
    alpha: float = 0.4
    gamma: float = 0.8
    threshold: str = "0"
    eps: List[float] = field(default_factory=list)
    levels: List[int] = field(default_factory=list)
    samples: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    format: str = "text"
    model: str = "rough-path"
    family: str = "db2"
    kernel: str = "riesz"
    mollifier: str = "heat"
    c: float = 0.5
    sine_n: int = 16
    workers: int = 1

    def to_dict(self) -> Dict:
        return asdict(self)

    def output_path(self) -> Optional[Path]:
        return resolve_output(self.out) if self.out else None


def parse_levels(text: str) -> List[int]:
    """``"2..7"`` or ``"2,4,6"`` into a list of integers."""
    match = _INT_RANGE.match(text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        step = 1 if hi >= lo else -1
        return list(range(lo, hi + step, step))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"invalid level list '{text}' (expected e.g. 2..7 or 2,3,4)")


def _number(text: str) -> float:
    match = _DYADIC.match(text)
    if match:
        return 2.0 ** int(match.group(1))
    return float(text)


def parse_eps_list(text: str) -> List[float]:
    """``"2^-3..2^-8"``, ``"2^-4"`` or ``"0.1,0.05"`` into a list of floats."""
    match = _DYADIC_RANGE.match(text)
    if match:
        return [2.0**p for p in parse_levels(f"{match.group(1)}..{match.group(2)}")]
    try:
        return [_number(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"invalid eps list '{text}' (expected e.g. 2^-3..2^-8 or 0.1,0.05)")


def _optional_int(text: str) -> Optional[int]:
    return None if text.lower() in ("", "none") else int(text)


def _optional_str(text: str) -> Optional[str]:
    return None if text.lower() in ("", "none") else text


_CONVERTERS: Dict[str, Callable[[str], object]] = {
    "alpha": _number,
    "gamma": _number,
    "c": _number,
    "eps": parse_eps_list,
    "levels": parse_levels,
    "samples": _optional_int,
    "workers": int,
    "sine_n": int,
    "seed": _optional_int,
    "out": _optional_str,
}


def _known_keys() -> List[str]:
    return [f.name for f in fields(ExperimentConfig)]


def _convert(key: str, value: str):
    try:
        return _CONVERTERS.get(key, str)(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: '{value}'")


def parse_config_text(text: str) -> Dict:
    """
    Parse ``key = value`` lines into typed overrides.

    Raises:
        ConfigError: On malformed lines or unknown keys
    """
    known = _known_keys()
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"line {number}: unknown key '{key}'")
        values[key] = _convert(key, value)
    return values


def _format_value(value) -> str:
    if isinstance(value, list):
        return ",".join(repr(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: ExperimentConfig) -> str:
    """Serialise ``config`` so that ``parse_config_text`` restores it exactly."""
    lines = []
    for key, value in config.to_dict().items():
        if value is None:
            continue
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def load_config_file(path: Union[str, Path]) -> Dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"could not read config file {path}: {e}")
    logger.debug("loaded config file %s", path)
    return parse_config_text(text)


def build_config(command: str, file_values: Optional[Dict] = None, flag_values: Optional[Dict] = None) -> ExperimentConfig:
    """Defaults, overridden by file values, overridden by flags."""
    config = ExperimentConfig(command=command)
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if key == "command" or value is None:
                continue
            setattr(config, key, value)
    if config.format not in FORMATS:
        raise ConfigError(f"unknown format '{config.format}'. Available: {', '.join(FORMATS)}")
    return config


def resolve_output(out: Union[str, Path]) -> Path:
    """Relative paths are taken against ``RS_OUTPUT_DIR`` when it is set."""
    path = Path(out)
    base = os.getenv(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


# Sample configurations for reference:

SAMPLE_SYMBOLS_CONFIG = {"command": "symbols", "threshold": "0"}

SAMPLE_RECONSTRUCT_CONFIG = {
    "command": "reconstruct-convergence",
    "alpha": 0.4,
    "gamma": 0.8,
    "levels": "2..7",
    "seed": 1,
    "family": "db2",
}

SAMPLE_RENORM_CONSTANTS_CONFIG = {
    "command": "renorm-constants",
    "eps": "2^-3..2^-8",
    "mollifier": "heat",
}

SAMPLE_PI2_CONFIG = {"command": "pi2", "eps": "2^-2..2^-4", "samples": 20000, "seed": 1}

SAMPLE_WICK_CONFIG = {"command": "wick-check", "samples": 100000, "seed": 1}
