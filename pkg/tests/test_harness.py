import json
import math
from pathlib import Path

import pytest

from zenolab.harness import (
    ConfigError,
    csv_bodies_equal,
    load_config,
    output_basename,
    read_csv,
    run_experiment,
    validate_config,
)

CONFIG_DIR = Path(__file__).parent / "data" / "v1" / "configs"
GOLDEN_DIR = Path(__file__).parent / "data" / "v1" / "golden"

ALL_FIXTURES = sorted(p.name for p in CONFIG_DIR.glob("*.json"))


def fixture_config(name, tmp_path, **updates):
    raw = json.loads((CONFIG_DIR / name).read_text())
    raw["output"]["path"] = str(tmp_path / Path(raw["output"]["path"]).name)
    for key, value in updates.items():
        raw[key] = value
    return raw


class TestValidation:
    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_fixture_configs_validate(self, name, tmp_path):
        cfg = validate_config(fixture_config(name, tmp_path))
        assert cfg.experiment in name

    def test_unknown_model_names_field(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["model"]["name"] = "no-such-model"
        with pytest.raises(ConfigError, match=r"model\.name"):
            validate_config(raw)

    def test_empty_grid_rejected_without_output(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["sweep"]["values"] = []
        with pytest.raises(ConfigError, match=r"sweep\.values"):
            validate_config(raw)
        assert not list(tmp_path.iterdir())

    def test_non_monotone_grid_rejected(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["sweep"]["values"] = [8, 8, 16]
        with pytest.raises(ConfigError, match="strictly increasing"):
            validate_config(raw)

    def test_incompatible_grid_kind(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["sweep"] = {"kind": "k", "values": [1.0, 2.0]}
        with pytest.raises(ConfigError, match=r"sweep\.kind"):
            validate_config(raw)

    def test_model_missing_member_for_experiment(self, tmp_path):
        raw = fixture_config("zeno_qubit.json", tmp_path)
        raw["model"] = {"name": "qubit-sx-scz", "dim": 2, "seed": 0}
        with pytest.raises(ConfigError, match="projector"):
            validate_config(raw)

    def test_missing_required_param(self, tmp_path):
        raw = fixture_config("optical_qubit.json", tmp_path)
        del raw["params"]["gamma"]
        with pytest.raises(ConfigError, match=r"params\.gamma"):
            validate_config(raw)

    def test_unknown_param_rejected(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["params"] = {"gamma": 1.0}
        with pytest.raises(ConfigError, match=r"params\.gamma"):
            validate_config(raw)

    def test_floquet_rejects_time_field(self, tmp_path):
        raw = fixture_config("floquet32.json", tmp_path)
        raw["t"] = 1.0
        with pytest.raises(ConfigError, match="t:"):
            validate_config(raw)

    def test_tolerance_profile_from_config_and_env(self, tmp_path, monkeypatch):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        assert validate_config(raw).tolerance_profile == "default"
        monkeypatch.setenv("ZENOLAB_TOLERANCE_PROFILE", "strict")
        assert validate_config(raw).tolerance_profile == "strict"
        raw["tolerances"] = {"profile": "default"}
        assert validate_config(raw).tolerance_profile == "default"

    def test_tolerance_override_validation(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["tolerances"] = {"profile": "default", "overrides": {"bogus_tol": 1.0}}
        with pytest.raises(ConfigError, match=r"tolerances\.overrides"):
            validate_config(raw)

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.json")

    def test_normalized_round_trips_through_validation(self, tmp_path):
        cfg = validate_config(fixture_config("equivalence_qubit.json", tmp_path))
        again = validate_config(cfg.normalized())
        assert again == cfg


class TestRun:
    def test_trotter_run_files_and_slope(self, tmp_path):
        cfg = validate_config(fixture_config("trotter_qubit.json", tmp_path))
        result = run_experiment(cfg)
        base = output_basename(cfg)
        header, rows = read_csv(base.with_suffix(".csv"))
        assert header == ["param", "error", "error_restricted", "wall_time_s"]
        assert len(rows) == 10
        assert all(row[2] == "" for row in rows)  # no restricted error for trotter
        sidecar = json.loads(base.with_suffix(".json").read_text())
        assert -1.15 <= sidecar["fit"]["slope"] <= -0.85
        assert sidecar["fit_on"] == "error"
        assert sidecar["provenance"]["version"]
        assert result.fitted_slope == sidecar["fit"]["slope"]

    def test_determinism_byte_identical_bodies(self, tmp_path):
        cfg_a = validate_config(fixture_config("trotter_random8.json", tmp_path / "a"))
        cfg_b = validate_config(fixture_config("trotter_random8.json", tmp_path / "b"))
        run_experiment(cfg_a)
        run_experiment(cfg_b)
        equal, detail = csv_bodies_equal(
            output_basename(cfg_a).with_suffix(".csv"),
            output_basename(cfg_b).with_suffix(".csv"),
        )
        assert equal, detail

    def test_provenance_echo_reproduces_run(self, tmp_path):
        cfg = validate_config(fixture_config("zeno_qubit.json", tmp_path / "first"))
        run_experiment(cfg)
        sidecar = json.loads(output_basename(cfg).with_suffix(".json").read_text())
        echo = sidecar["provenance"]["config"]
        echo["output"]["path"] = str(tmp_path / "second" / "zeno_qubit")
        rerun_cfg = validate_config(echo)
        run_experiment(rerun_cfg)
        equal, detail = csv_bodies_equal(
            output_basename(cfg).with_suffix(".csv"),
            output_basename(rerun_cfg).with_suffix(".csv"),
        )
        assert equal, detail

    def test_zeno_survival_record(self, tmp_path):
        cfg = validate_config(fixture_config("zeno_qubit.json", tmp_path))
        result = run_experiment(cfg)
        by_param = {r.params[0]: r for r in result.records}
        survival = by_param[100.0].extras["survival_probability"]
        assert abs(survival - math.cos(0.01) ** 200) < 1e-6
        sidecar = json.loads(output_basename(cfg).with_suffix(".json").read_text())
        rec = [e for e in sidecar["record_extras"] if e["params"] == [100.0]]
        assert rec and abs(rec[0]["survival_probability"] - survival) == 0.0

    def test_workers_do_not_change_results(self, tmp_path):
        cfg_a = validate_config(fixture_config("continuous_qubit.json", tmp_path / "a"))
        cfg_b = validate_config(fixture_config("continuous_qubit.json", tmp_path / "b"))
        run_experiment(cfg_a, workers=1)
        run_experiment(cfg_b, workers=4)
        equal, detail = csv_bodies_equal(
            output_basename(cfg_a).with_suffix(".csv"),
            output_basename(cfg_b).with_suffix(".csv"),
        )
        assert equal, detail

    def test_equivalence_csv_layout(self, tmp_path):
        cfg = validate_config(fixture_config("equivalence_qubit.json", tmp_path))
        result = run_experiment(cfg)
        header, rows = read_csv(output_basename(cfg).with_suffix(".csv"))
        assert header == ["param_tau", "param_k", "error", "error_restricted", "wall_time_s"]
        surface = [r for r in rows if r[0] != "" and r[1] != ""]
        cont_path = [r for r in rows if r[0] == "" and r[1] != ""]
        puls_path = [r for r in rows if r[0] != "" and r[1] == ""]
        assert len(surface) == 81
        assert len(cont_path) == 9
        assert len(puls_path) == 9
        summary = result.extras["limit_exchange"]
        assert summary["discrepancy"] <= 2 * max(
            summary["distance_continuous"], summary["distance_pulsed"]
        )

    def test_floquet_records_drift(self, tmp_path):
        raw = fixture_config("floquet32.json", tmp_path)
        raw["sweep"]["values"] = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1000]
        raw["model"]["dim"] = 8
        cfg = validate_config(raw)
        result = run_experiment(cfg)
        assert result.fit is None
        assert "drift" in result.fit_message
        assert result.records[-1].error <= 1e-10

    def test_json_output_format(self, tmp_path):
        raw = fixture_config("trotter_qubit.json", tmp_path)
        raw["output"]["format"] = "json"
        cfg = validate_config(raw)
        run_experiment(cfg)
        base = output_basename(cfg)
        assert not base.with_suffix(".csv").exists()
        payload = json.loads(base.with_suffix(".json").read_text())
        assert len(payload["records"]) == 10
        assert payload["records"][0]["params"] == [8.0]

    def test_kick_runs_on_block_model(self, tmp_path):
        cfg = validate_config(fixture_config("kick_block3.json", tmp_path))
        result = run_experiment(cfg)
        assert result.extras["kick_sector_count"] == 2
        assert -1.15 <= result.fit.slope <= -0.85


class TestGolden:
    def test_trotter_golden_csv(self, tmp_path):
        golden = GOLDEN_DIR / "trotter_qubit.csv"
        cfg = validate_config(fixture_config("trotter_qubit.json", tmp_path))
        run_experiment(cfg)
        equal, detail = csv_bodies_equal(
            output_basename(cfg).with_suffix(".csv"), golden, rel_tol=1e-9
        )
        assert equal, detail


class TestCsvComparison:
    def test_wall_time_column_is_ignored(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("param,error,error_restricted,wall_time_s\n8,0.5,,0.111\n")
        b.write_text("param,error,error_restricted,wall_time_s\n8,0.5,,9.999\n")
        assert csv_bodies_equal(a, b)[0]

    def test_tolerant_mode_accepts_small_relative_drift(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("param,error,error_restricted,wall_time_s\n8,0.5000000001,,0\n")
        b.write_text("param,error,error_restricted,wall_time_s\n8,0.5,,0\n")
        assert not csv_bodies_equal(a, b)[0]
        assert csv_bodies_equal(a, b, rel_tol=1e-9)[0]
        assert not csv_bodies_equal(a, b, rel_tol=1e-12)[0]

    def test_mismatched_values_reported(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("param,error,error_restricted,wall_time_s\n8,0.5,,0\n")
        b.write_text("param,error,error_restricted,wall_time_s\n8,0.7,,0\n")
        equal, detail = csv_bodies_equal(a, b, rel_tol=1e-9)
        assert not equal
        assert "error" in detail
