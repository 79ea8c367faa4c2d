"""End-to-end checks of the command-line pipeline driver."""

import json
import subprocess

import pytest

from keydyn import ExperimentConfig, ForestParams
from keydyn.cli import main

FAST_CONFIG = ExperimentConfig(
    seed=9, n_chars=300, forest=ForestParams(n_estimators=30)
)


@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    """A two-user grid with features extracted, driven through the CLI."""
    out = tmp_path_factory.mktemp("exp")
    FAST_CONFIG.save(out / "config.json")
    assert main(["simulate", "--out", str(out), "--users", "2"]) == 0
    assert main(["extract", "--out", str(out)]) == 0
    return out


class TestInit:
    def test_writes_default_config(self, tmp_path, capsys):
        assert main(["init", "--out", str(tmp_path)]) == 0
        path = tmp_path / "config.json"
        assert str(path) in capsys.readouterr().out
        assert ExperimentConfig.load(path) == ExperimentConfig()

    def test_seed_override(self, tmp_path):
        assert main(["init", "--out", str(tmp_path), "--seed", "3"]) == 0
        assert ExperimentConfig.load(tmp_path / "config.json").seed == 3


class TestSimulate:
    def test_grid_files_on_disk(self, experiment, capsys):
        data = experiment / "data"
        assert (data / "manifest.json").exists()
        assert len(list(data.glob("user*.csv"))) == 8

    def test_user_bound_validated(self, tmp_path, capsys):
        assert main(["simulate", "--out", str(tmp_path), "--users", "99"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_config_file_precedence(self, tmp_path, capsys):
        alt = tmp_path / "alt.json"
        ExperimentConfig(seed=4, n_chars=60).save(alt)
        out = tmp_path / "exp"
        code = main([
            "simulate", "--out", str(out), "--config", str(alt), "--users", "1"
        ])
        assert code == 0
        manifest = json.loads((out / "data" / "manifest.json").read_text())
        assert manifest["n_chars"] == 60
        assert manifest["seed"] == 4
        assert len(manifest["sessions"]) == 4


class TestExtract:
    def test_feature_files_on_disk(self, experiment):
        names = sorted(p.name for p in (experiment / "features").glob("*.csv"))
        assert len(names) == 8
        assert "user1_laptop_s1_features.csv" in names

    def test_missing_data_errors(self, tmp_path, capsys):
        assert main(["extract", "--out", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err


class TestKs:
    def test_writes_tables_and_summary(self, experiment, capsys):
        assert main(["ks", "--out", str(experiment)]) == 0
        summary = json.loads(capsys.readouterr().out)
        reports = experiment / "reports"
        for kind in ("laptop", "mechanical"):
            assert (reports / f"ks_{kind}.csv").exists()
            assert (reports / f"ks_{kind}.json").exists()
            stats = summary[kind]
            assert 0 <= stats["diagonal_agents_matching"] <= 2
            assert stats["cross_cells_total"] == 2
        assert (reports / "ks_cross_keyboard.csv").exists()
        assert 0 <= summary["cross_keyboard_dwell_separated"] <= 2

    def test_keyboard_filter(self, experiment, capsys):
        assert main(["ks", "--out", str(experiment), "--keyboard", "laptop"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert set(summary) == {"laptop"}


class TestOcsvm:
    def test_writes_all_pairings(self, experiment, capsys):
        assert main(["ocsvm", "--out", str(experiment)]) == 0
        summary = json.loads(capsys.readouterr().out)
        reports = experiment / "reports"
        assert len(summary) == 4
        for pairing, stats in summary.items():
            assert (reports / f"ocsvm_{pairing}.csv").exists()
            assert (reports / f"ocsvm_{pairing}.json").exists()
            assert 0.0 <= stats["mean_same_user_rate"] <= 100.0
            assert 0.0 <= stats["mean_cross_user_rate"] <= 100.0

    def test_nu_override_lands_in_report(self, experiment, capsys):
        assert main(["ocsvm", "--out", str(experiment), "--nu", "0.2"]) == 0
        capsys.readouterr()
        doc = json.loads(
            (experiment / "reports" / "ocsvm_laptop1_laptop2.json").read_text()
        )
        assert doc["nu"] == 0.2
        # restore the config-value outputs for later tests
        assert main(["ocsvm", "--out", str(experiment)]) == 0
        capsys.readouterr()


class TestRf:
    def test_single_keyboard_matrix(self, experiment, capsys):
        assert main(["rf", "--out", str(experiment), "--keyboard", "laptop"]) == 0
        summary = json.loads(capsys.readouterr().out)
        reports = experiment / "reports"
        assert (reports / "rf_laptop.csv").exists()
        assert (reports / "rf_laptop.json").exists()
        assert (reports / "importances_laptop.csv").exists()
        stats = summary["laptop"]
        assert stats["total_cells"] == 6
        assert stats["same_user_cells"] + stats["different_user_cells"] == 6

    def test_cv_override_accepted(self, experiment, capsys):
        code = main([
            "rf", "--out", str(experiment),
            "--keyboard", "laptop", "--cv", "stratified",
        ])
        assert code == 0
        capsys.readouterr()
        # restore blocked-cv outputs for the report determinism test
        assert main(["rf", "--out", str(experiment), "--keyboard", "laptop"]) == 0
        capsys.readouterr()


class TestReport:
    def test_full_report(self, experiment, capsys):
        assert main(["report", "--out", str(experiment)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert set(summary) == {"ks", "ocsvm", "rf"}
        assert "cross_keyboard_min_accuracy" in summary["rf"]
        on_disk = json.loads((experiment / "reports" / "summary.json").read_text())
        assert on_disk == summary

    def test_report_is_deterministic(self, experiment, capsys):
        reports = experiment / "reports"
        first = {
            p.name: p.read_bytes() for p in reports.iterdir() if p.is_file()
        }
        assert main(["report", "--out", str(experiment)]) == 0
        capsys.readouterr()
        for name, blob in first.items():
            assert (reports / name).read_bytes() == blob, name

    def test_section_filter(self, experiment, capsys):
        assert main(["report", "--out", str(experiment), "--which", "ks"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert set(summary) == {"ks"}


class TestParser:
    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["init", "--bogus"])
        assert exc.value.code == 2

    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_console_script_help(self):
        proc = subprocess.run(
            ["keydyn", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "simulate" in proc.stdout
