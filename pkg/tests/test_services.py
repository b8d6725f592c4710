import pytest

from src.errors import ConfigError
from src.services import ExperimentFactory, ExperimentResult
from src.services.config import (
    SAMPLE_RECONSTRUCT_CONFIG,
    ExperimentConfig,
    build_config,
    dump_config,
    parse_config_text,
    parse_eps_list,
    parse_levels,
    resolve_output,
)

EXPECTED_COMMANDS = {
    "symbols",
    "renorm-eq",
    "wavelet-check",
    "model-check",
    "reconstruct-convergence",
    "rough-integrate",
    "toy-product",
    "kernel-check",
    "renorm-constants",
    "pi2",
    "wick-check",
}


def test_every_subcommand_is_registered():
    assert set(ExperimentFactory.list_available_services()) == EXPECTED_COMMANDS


def test_unknown_service_lists_available():
    with pytest.raises(ValueError, match="Available: symbols"):
        ExperimentFactory.create_service("nope")


def test_service_info():
    info = ExperimentFactory.create_service("pi2").get_service_info()
    assert info["name"] == "pi2"
    assert info["stochastic"] is True
    assert "seed" in info["parameters"]


@pytest.mark.parametrize("command", ["pi2", "wick-check", "reconstruct-convergence"])
def test_stochastic_services_require_seed(command):
    service = ExperimentFactory.create_service(command)
    assert any("seed" in p for p in service.validate(ExperimentConfig(command=command)))
    assert service.validate(ExperimentConfig(command=command, seed=3)) == []


def test_model_check_seed_depends_on_model():
    service = ExperimentFactory.create_service("model-check")
    assert service.validate(ExperimentConfig(command="model-check", model="polynomial")) == []
    problems = service.validate(ExperimentConfig(command="model-check", model="mollified-noise"))
    assert problems and "seed" in problems[0]
    problems = service.validate(ExperimentConfig(command="model-check", model="brownian-sheet"))
    assert "Available" in problems[0]


def test_range_validation():
    service = ExperimentFactory.create_service("reconstruct-convergence")
    config = ExperimentConfig(command="reconstruct-convergence", seed=1, alpha=0.6, levels=[0, 3])
    problems = service.validate(config)
    assert len(problems) == 2
    config = ExperimentConfig(command="symbols", samples=1, workers=0, eps=[0.0])
    assert len(ExperimentFactory.create_service("symbols").validate(config)) == 3


def test_result_defaults():
    failed = ExperimentResult(success=False)
    assert failed.error_message == "Unknown experiment error"
    assert not failed.passed
    result = ExperimentResult(success=True, checks={"a": 1, "b": 0})
    assert result.checks == {"a": True, "b": False}
    assert result.failed_checks == ["b"]


def test_parse_levels():
    assert parse_levels("2..7") == [2, 3, 4, 5, 6, 7]
    assert parse_levels("7..5") == [7, 6, 5]
    assert parse_levels("2, 4,6") == [2, 4, 6]
    with pytest.raises(ConfigError):
        parse_levels("two")


def test_parse_eps_list():
    assert parse_eps_list("2^-3..2^-5") == [0.125, 0.0625, 0.03125]
    assert parse_eps_list("2^-4") == [0.0625]
    assert parse_eps_list("0.1,0.05") == [0.1, 0.05]
    with pytest.raises(ConfigError):
        parse_eps_list("2^-3..")


def test_parse_config_text():
    values = parse_config_text(
        """
        # reconstruction sweep
        command = reconstruct-convergence
        levels = 2..4   # inclusive
        eps = 2^-3
        seed = 1
        """
    )
    assert values == {"command": "reconstruct-convergence", "levels": [2, 3, 4], "eps": [0.125], "seed": 1}


@pytest.mark.parametrize("text", ["alpha 0.4", "colour = red", "samples = many"])
def test_parse_config_text_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_config_round_trip():
    config = ExperimentConfig(
        command="pi2",
        alpha=0.1 + 0.2,
        eps=[2.0**-3, 0.1],
        levels=[2, 5],
        samples=20_000,
        seed=7,
        out="runs/pi2",
        format="json",
        c=1 / 3,
        workers=4,
    )
    restored = build_config("pi2", parse_config_text(dump_config(config)))
    assert restored == config


def test_round_trip_without_seed():
    config = ExperimentConfig(command="symbols", threshold="-1/2-k")
    assert build_config("symbols", parse_config_text(dump_config(config))) == config


def test_flags_override_file():
    config = build_config(
        "reconstruct-convergence",
        {"alpha": 0.35, "seed": 1},
        {"alpha": 0.45, "seed": None},
    )
    assert config.alpha == 0.45
    assert config.seed == 1
    assert config.gamma == 0.8


def test_build_config_rejects_format():
    with pytest.raises(ConfigError):
        build_config("symbols", {"format": "xml"})


def test_resolve_output(monkeypatch, tmp_path):
    monkeypatch.delenv("RS_OUTPUT_DIR", raising=False)
    assert str(resolve_output("a/b")) == "a/b"
    monkeypatch.setenv("RS_OUTPUT_DIR", str(tmp_path))
    assert resolve_output("a/b") == tmp_path / "a" / "b"
    assert resolve_output(tmp_path / "abs") == tmp_path / "abs"


def test_sample_config_builds():
    values = parse_config_text("\n".join(f"{k} = {v}" for k, v in SAMPLE_RECONSTRUCT_CONFIG.items()))
    config = build_config(values.pop("command"), values)
    assert config.levels == [2, 3, 4, 5, 6, 7]
    assert ExperimentFactory.create_service(config.command).validate(config) == []


def test_model_check_forwards_sine_frequency():
    from src.models import ModelFactory
    from src.services.analysis import _model_kwargs

    config = build_config("model-check", parse_config_text("model = toy-sine\nsine-n = 64\n"))
    assert _model_kwargs(config) == {"c": 0.5, "n": 64}
    assert ModelFactory.create_model(config.model, **_model_kwargs(config)).n == 64
    service = ExperimentFactory.create_service("model-check")
    assert service.validate(config) == []
    config.sine_n = 0
    assert "sine_n" in service.validate(config)[0]


def test_unset_samples_fall_back_to_service_default():
    wick = ExperimentFactory.create_service("wick-check")
    pi2 = ExperimentFactory.create_service("pi2")
    assert wick.sample_count(ExperimentConfig(command="wick-check")) == 100_000
    assert pi2.sample_count(ExperimentConfig(command="pi2")) == 10_000
    assert wick.sample_count(ExperimentConfig(command="wick-check", samples=500)) == 500
    assert parse_config_text("samples = none") == {"samples": None}


def test_heat_kernel_check_compares_jet_coefficients():
    config = ExperimentConfig(command="kernel-check", kernel="heat", levels=[5])
    result = ExperimentFactory.create_service("kernel-check").run(config)
    assert result.checks["heat_jet_convolution"]
    assert result.summary["heat_jet_convolution"]["indices"] == [[0, 0], [0, 1], [0, 2], [1, 0]]
