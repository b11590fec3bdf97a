import json
from pathlib import Path

import pytest

from zenolab._version import __version__
from zenolab.cli import cli_main

CONFIG_DIR = Path(__file__).parent / "data" / "v1" / "configs"


def write_config(tmp_path, name="trotter_qubit.json", **updates):
    raw = json.loads((CONFIG_DIR / name).read_text())
    raw["output"]["path"] = str(tmp_path / "out" / Path(raw["output"]["path"]).name)
    raw.update(updates)
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path, Path(raw["output"]["path"])


def test_version(capsys):
    assert cli_main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_list_models(capsys):
    assert cli_main(["list-models"]) == 0
    out = capsys.readouterr().out
    for name in ("qubit-sx-pz", "qubit-sx-scz", "random-split", "three-level-block", "kicked-floquet"):
        assert name in out


def test_validate_good_config_prints_normalized_form(tmp_path, capsys):
    path, _ = write_config(tmp_path)
    assert cli_main(["validate", str(path)]) == 0
    normalized = json.loads(capsys.readouterr().out)
    assert normalized["experiment"] == "trotter"
    assert normalized["tolerances"]["profile"] == "default"


def test_validate_respects_env_profile(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ZENOLAB_TOLERANCE_PROFILE", "strict")
    path, _ = write_config(tmp_path)
    assert cli_main(["validate", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["tolerances"]["profile"] == "strict"


def test_validate_bad_config_exits_one(tmp_path, capsys):
    path, _ = write_config(tmp_path)
    raw = json.loads(path.read_text())
    raw["model"]["name"] = "bogus"
    path.write_text(json.dumps(raw))
    assert cli_main(["validate", str(path)]) == 1
    err = capsys.readouterr().err
    assert "model.name" in err


def test_run_writes_data_files_only(tmp_path, capsys):
    path, out = write_config(tmp_path, "continuous_qubit.json")
    assert cli_main(["run", str(path)]) == 0
    captured = capsys.readouterr()
    assert captured.out == ""  # data goes to files, diagnostics to stderr
    assert "wrote" in captured.err
    assert out.with_suffix(".csv").exists()
    assert out.with_suffix(".json").exists()


def test_run_unknown_model_exits_one(tmp_path, capsys):
    path, out = write_config(tmp_path)
    raw = json.loads(path.read_text())
    raw["model"]["name"] = "bogus"
    path.write_text(json.dumps(raw))
    assert cli_main(["run", str(path)]) == 1
    assert "model.name" in capsys.readouterr().err
    assert not out.with_suffix(".csv").exists()


def test_run_unwritable_output_exits_two(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    path, _ = write_config(tmp_path)
    raw = json.loads(path.read_text())
    raw["output"]["path"] = str(blocker / "sub" / "result")
    path.write_text(json.dumps(raw))
    assert cli_main(["run", str(path)]) == 2
    assert "runtime error" in capsys.readouterr().err


def test_run_with_figures(tmp_path, capsys):
    path, out = write_config(tmp_path, "continuous_qubit.json")
    assert cli_main(["run", str(path), "--figures"]) == 0
    png = out.with_suffix(".png")
    assert png.exists() and png.stat().st_size > 0


def test_run_workers_flag(tmp_path):
    path, out = write_config(tmp_path, "continuous_qubit.json")
    assert cli_main(["run", str(path), "--workers", "3"]) == 0
    assert out.with_suffix(".csv").exists()
    assert cli_main(["run", str(path), "--workers", "0"]) == 1


def test_report_renders_from_existing_outputs(tmp_path, capsys):
    path, out = write_config(tmp_path, "continuous_qubit.json")
    assert cli_main(["run", str(path)]) == 0
    assert cli_main(["report", str(out.with_suffix(".csv"))]) == 0
    assert out.with_suffix(".png").exists()


def test_report_missing_outputs_exits_one(tmp_path, capsys):
    assert cli_main(["report", str(tmp_path / "missing")]) == 1


def test_usage_error_exits_one(capsys):
    assert cli_main(["no-such-command"]) == 1
