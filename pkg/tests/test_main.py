import json
from pathlib import Path

import pytest

from src import main as cli
from src.errors import ModelError
from src.services import ExperimentFactory, ExperimentResult, ExperimentService
from src.services.config import ExperimentConfig


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_symbols_text_output(capsys):
    code, out, _ = run_cli(["symbols", "--threshold", "0"], capsys)
    assert code == 0
    assert "[symbols] PASS" in out
    assert "X_i<2>" in out


def test_renorm_eq_json_reports_counterterm(capsys):
    code, out, _ = run_cli(["renorm-eq", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["result"]["counterterm"] == "3*C1 - 9*C2"
    assert data["result"]["difference_is_zero"] is True
    assert all(data["checks"].values())


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_malformed_levels_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["reconstruct-convergence", "--levels", "2..x", "--seed", "1"])
    assert exc.value.code == 2
    assert "invalid level list" in capsys.readouterr().err


def test_stochastic_command_without_seed_exits_2(capsys):
    code, _, err = run_cli(["pi2", "--eps", "2^-2"], capsys)
    assert code == 2
    assert "explicit --seed" in err


def test_out_of_range_eps_exits_2(capsys):
    code, _, err = run_cli(["renorm-constants", "--eps", "2,0.5"], capsys)
    assert code == 2
    assert "(0, 1]" in err


def test_config_file_values_are_overridden_by_flags(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("# symbols only\nthreshold = 1/2\nformat = json\n")
    code, out, _ = run_cli(["symbols", "--config", str(config)], capsys)
    assert code == 0
    assert json.loads(out)["parameters"]["threshold"] == "1/2"

    code, out, _ = run_cli(["symbols", "--config", str(config), "--threshold", "0"], capsys)
    assert json.loads(out)["parameters"]["threshold"] == "0"


def test_bad_config_file_exits_2(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("colour = blue\n")
    code, _, err = run_cli(["symbols", "--config", str(config)], capsys)
    assert code == 2
    assert "unknown key" in err


def test_artifacts_written_next_to_out(tmp_path, capsys):
    out = tmp_path / "results" / "table"
    code, _, _ = run_cli(["symbols", "--out", str(out)], capsys)
    assert code == 0
    body = (tmp_path / "results" / "table.csv").read_text()
    assert body.splitlines()[0] == "name,homogeneity,degree,kappa,multiplicity"
    assert "\r" not in body
    summary = json.loads((tmp_path / "results" / "table.json").read_text())
    assert summary["version"] == "v0.1.0"
    assert summary["command"] == "symbols"
    assert summary["passed"] is True
    assert summary["checks"] == {"negative_symbols": True}
    assert "timestamp" in summary


def test_csv_bodies_are_reproducible(tmp_path, capsys):
    run_cli(["symbols", "--threshold", "1/2", "--out", str(tmp_path / "a")], capsys)
    run_cli(["symbols", "--threshold", "1/2", "--out", str(tmp_path / "b")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_relative_out_uses_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RS_OUTPUT_DIR", str(tmp_path))
    code, _, _ = run_cli(["renorm-eq", "--out", "eq"], capsys)
    assert code == 0
    # renorm-eq has no tables, only the summary
    assert (tmp_path / "eq.json").exists()
    assert not list(tmp_path.glob("*.csv"))


def test_artifact_paths():
    single = cli.artifact_paths(Path("out/run.csv"), ["symbols"])
    assert single == {"symbols": Path("out/run.csv"), "summary": Path("out/run.json")}
    several = cli.artifact_paths(Path("out/run"), ["a", "b"])
    assert several["a"] == Path("out/run_a.csv")
    assert several["b"] == Path("out/run_b.csv")
    assert several["summary"] == Path("out/run.json")


class BoomService(ExperimentService):
    name = "boom"
    description = "always raises"

    def run(self, config):
        raise ModelError("Chen relation violated")


class FailingCheckService(ExperimentService):
    name = "failing"
    description = "one check fails"

    def run(self, config):
        return ExperimentResult(
            success=True,
            checks={"ok": True, "bad": False},
            artifacts={"first": [{"x": 1.0}], "second": [{"y": 2.0}]},
        )


def test_library_error_gives_exit_1(monkeypatch, tmp_path, capsys):
    monkeypatch.setitem(ExperimentFactory._services, "boom", BoomService)
    code = cli.run(ExperimentConfig(command="boom", out=str(tmp_path / "boom")))
    out = capsys.readouterr().out
    assert code == 1
    assert "Chen relation violated" in out
    assert not list(tmp_path.iterdir())


def test_failed_check_gives_exit_1_and_keeps_data(monkeypatch, tmp_path, capsys):
    monkeypatch.setitem(ExperimentFactory._services, "failing", FailingCheckService)
    code = cli.run(ExperimentConfig(command="failing", out=str(tmp_path / "f")))
    assert code == 1
    assert "BAD bad" in capsys.readouterr().out
    assert (tmp_path / "f_first.csv").read_text() == "x\n1.0\n"
    assert (tmp_path / "f_second.csv").exists()
    assert json.loads((tmp_path / "f.json").read_text())["passed"] is False


def test_partial_files_removed_when_writing_fails(monkeypatch, tmp_path):
    monkeypatch.setitem(ExperimentFactory._services, "failing", FailingCheckService)
    original = cli.write_csv
    calls = []

    def flaky(path, rows):
        calls.append(path)
        if len(calls) == 2:
            raise OSError("disk full")
        original(path, rows)

    monkeypatch.setattr(cli, "write_csv", flaky)
    code = cli.run(ExperimentConfig(command="failing", out=str(tmp_path / "f")))
    assert code == 1
    assert not list(tmp_path.iterdir())


def test_debug_logs_go_to_stderr_with_component_prefix(capsys):
    code, out, err = run_cli(["symbols", "--debug", "--format", "json"], capsys)
    assert code == 0
    assert "[symbolic] generated 8 symbols" in err
    # stdout stays pure JSON
    assert json.loads(out)["command"] == "symbols"


def test_sine_frequency_flag_reaches_config():
    args = vars(cli.build_parser().parse_args(["model-check", "--model", "toy-sine", "--sine-n", "8"]))
    args.pop("debug")
    config = cli.build_config(args.pop("command"), {}, args)
    assert config.sine_n == 8
