"""Experiment configuration: defaults, validation, and file round-trips."""

import dataclasses

import pytest

from keydyn import (
    DEFAULT_FOREST_PARAMS,
    DEFAULT_PROFILE_RANGES,
    ExperimentConfig,
    ForestParams,
)


class TestDefaults:
    def test_reference_values(self):
        cfg = ExperimentConfig()
        assert cfg.seed == 20
        assert cfg.n_chars == 1000
        assert cfg.sessions_per_keyboard == 2
        assert cfg.nu == 0.1
        assert cfg.gamma == "median"
        assert cfg.threshold == 0.7
        assert cfg.ocsvm_transform == "per-session"
        assert cfg.rf_cv == "blocked"
        assert cfg.forest == DEFAULT_FOREST_PARAMS
        assert cfg.ranges == DEFAULT_PROFILE_RANGES

    def test_frozen(self):
        cfg = ExperimentConfig()
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.seed = 1

    def test_replace_returns_new_config(self):
        cfg = ExperimentConfig()
        other = cfg.replace(seed=7, n_chars=100)
        assert other.seed == 7 and other.n_chars == 100
        assert cfg.seed == 20


class TestValidation:
    def test_bad_values_rejected(self):
        with pytest.raises(ValueError, match="n_chars"):
            ExperimentConfig(n_chars=0)
        with pytest.raises(ValueError, match="sessions"):
            ExperimentConfig(sessions_per_keyboard=0)
        with pytest.raises(ValueError, match="nu"):
            ExperimentConfig(nu=0.0)
        with pytest.raises(ValueError, match="nu"):
            ExperimentConfig(nu=1.5)
        with pytest.raises(ValueError, match="threshold"):
            ExperimentConfig(threshold=1.0)

    def test_unknown_keys_rejected(self):
        doc = ExperimentConfig().to_dict()
        doc["typo_field"] = 3
        with pytest.raises(ValueError, match="typo_field"):
            ExperimentConfig.from_dict(doc)


class TestRoundTrip:
    def test_dict_round_trip(self):
        cfg = ExperimentConfig(seed=5, forest=ForestParams(n_estimators=99))
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_file_round_trip(self, tmp_path):
        cfg = ExperimentConfig(seed=11, n_chars=250, gamma=0.5)
        path = cfg.save(tmp_path / "config.json")
        assert ExperimentConfig.load(path) == cfg

    def test_partial_dict_uses_defaults(self):
        cfg = ExperimentConfig.from_dict({"seed": 3})
        assert cfg.seed == 3
        assert cfg.n_chars == 1000

    def test_saved_file_is_stable(self, tmp_path):
        cfg = ExperimentConfig()
        a = cfg.save(tmp_path / "a.json").read_text()
        b = ExperimentConfig.load(tmp_path / "a.json").save(tmp_path / "b.json").read_text()
        assert a == b
