"""
Command-line driver for the regularity-structures experiments.

Every subcommand is an ``ExperimentService``. The driver builds the
configuration, runs the service, writes CSV artifacts and a JSON summary
next to ``--out`` and maps the outcome to an exit status: 0 when every check
passed, 1 when a check failed or the run raised, 2 on usage errors.
"""

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .errors import ConfigError, RegularityError
from .log import configure_logging
from .services import ExperimentFactory, ExperimentResult
from .services.config import (
    ExperimentConfig,
    build_config,
    load_config_file,
    parse_eps_list,
    parse_levels,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _flag_type(parse):
    def convert(text: str):
        try:
            return parse(text)
        except ConfigError as e:
            raise argparse.ArgumentTypeError(str(e))

    convert.__name__ = parse.__name__
    return convert


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    default = argparse.SUPPRESS
    common.add_argument("--config", default=None, help="key = value configuration file")
    common.add_argument("--debug", action="store_true", help="Enable debug logging on stderr")
    common.add_argument(
        "--format",
        choices=["text", "json"],
        default=default,
        help="Output format: text (default) or json",
    )
    common.add_argument("--out", default=default, help="Base path for CSV and JSON artifacts")
    common.add_argument("--seed", type=int, default=default, help="Master seed for stochastic runs")
    common.add_argument("--alpha", type=float, default=default)
    common.add_argument("--gamma", type=float, default=default)
    common.add_argument("--threshold", default=default, help="Homogeneity threshold, e.g. 0 or 1/2")
    common.add_argument("--levels", type=_flag_type(parse_levels), default=default, help="e.g. 2..7 or 2,3,4")
    common.add_argument(
        "--eps", "--eps-list", dest="eps", type=_flag_type(parse_eps_list), default=default, help="e.g. 2^-3..2^-8"
    )
    common.add_argument("--samples", type=int, default=default)
    common.add_argument("--model", default=default)
    common.add_argument("--family", default=default, help="Wavelet family: haar, db2, db3")
    common.add_argument("--kernel", default=default, help="Kernel profile: riesz, heaviside, heat")
    common.add_argument("--mollifier", default=default)
    common.add_argument("--c", type=float, default=default, help="Toy model constant")
    common.add_argument("--sine-n", dest="sine_n", type=int, default=default, help="Frequency of the toy-sine model")
    common.add_argument("--workers", type=int, default=default)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regstruct", description="Numerical and symbolic checks for regularity structures."
    )
    parser.add_argument("--version", action="version", version=f"v{__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    common = _common_flags()
    for name in ExperimentFactory.list_available_services():
        service = ExperimentFactory.create_service(name)
        commands.add_parser(name, parents=[common], help=service.description)
    return parser


def artifact_paths(out: Path, names: Sequence[str]) -> Dict[str, Path]:
    """``<stem>.csv`` for a single artifact, ``<stem>_<name>.csv`` otherwise, plus ``<stem>.json``."""
    base = out.with_suffix("") if out.suffix in (".csv", ".json") else out
    paths = {}
    if len(names) == 1:
        paths[names[0]] = base.with_name(base.name + ".csv")
    else:
        for name in names:
            paths[name] = base.with_name(f"{base.name}_{name}.csv")
    paths["summary"] = base.with_name(base.name + ".json")
    return paths


def write_csv(path: Path, rows: List[Dict]) -> None:
    columns = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_value(v) for k, v in row.items()})


def _csv_value(value):
    if isinstance(value, float):
        return repr(value)
    return value


def summarize(config: ExperimentConfig, result: ExperimentResult) -> Dict:
    return {
        "command": config.command,
        "version": f"v{__version__}",
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "parameters": config.to_dict(),
        "success": result.success,
        "passed": result.passed,
        "checks": result.checks,
        "error_message": result.error_message or None,
        "result": result.summary,
    }


def _json_default(value):
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def write_artifacts(config: ExperimentConfig, result: ExperimentResult, summary: Dict) -> List[Path]:
    """Write every artifact; on any failure remove what was written and re-raise."""
    out = config.output_path()
    if out is None:
        return []
    paths = artifact_paths(out, list(result.artifacts))
    written: List[Path] = []
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        for name, rows in result.artifacts.items():
            written.append(paths[name])
            write_csv(paths[name], rows)
        written.append(paths["summary"])
        with open(paths["summary"], "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, default=_json_default)
            fh.write("\n")
    except Exception:
        remove_partial(written)
        raise
    return written


def remove_partial(paths: Sequence[Path]) -> None:
    for path in paths:
        try:
            Path(path).unlink()
        except FileNotFoundError:
            pass


def execute(config: ExperimentConfig) -> ExperimentResult:
    service = ExperimentFactory.create_service(config.command)
    try:
        return service.run(config)
    except (RegularityError, ValueError, ArithmeticError) as e:
        logger.error("%s failed: %s", config.command, e)
        return ExperimentResult(success=False, error_message=str(e))


def run(config: ExperimentConfig) -> int:
    """Validate, execute, persist and report one experiment; returns the exit status."""
    try:
        service = ExperimentFactory.create_service(config.command)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    problems = service.validate(config)
    if problems:
        for problem in problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_USAGE

    result = execute(config)
    summary = summarize(config, result)
    if result.success:
        try:
            written = write_artifacts(config, result, summary)
        except OSError as e:
            print(f"error: could not write artifacts: {e}", file=sys.stderr)
            return EXIT_FAILED
        for path in written:
            logger.info("wrote %s", path)
    else:
        out = config.output_path()
        if out is not None:
            remove_partial(artifact_paths(out, list(result.artifacts)).values())

    print_result(config, summary)
    return EXIT_OK if result.passed else EXIT_FAILED


def print_result(config: ExperimentConfig, summary: Dict) -> None:
    if config.format == "json":
        print(json.dumps(summary, indent=2, default=_json_default))
        return
    status = "PASS" if summary["passed"] else "FAIL"
    print(f"[{config.command}] {status} ({summary['version']})")
    if summary["error_message"]:
        print(f"  error: {summary['error_message']}")
    for name, ok in summary["checks"].items():
        print(f"  {'ok ' if ok else 'BAD'} {name}")
    if config.command == "symbols":
        for row in summary["result"]["symbols"]:
            print(f"  {row['name']:<10} {row['homogeneity']}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    configure_logging(args.pop("debug", False))
    command = args.pop("command")
    config_file = args.pop("config", None)
    try:
        file_values = load_config_file(config_file) if config_file else {}
        config = build_config(command, file_values, args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
