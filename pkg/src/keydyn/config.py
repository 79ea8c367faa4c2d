"""Experiment configuration with file round-tripping.

One config object carries every knob of the pipeline: the seed, grid
shape, profile ranges, and classifier parameters. Defaults reproduce the
reference experiment; a config survives a save/load cycle unchanged.
"""

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .profiles import DEFAULT_PROFILE_RANGES, ProfileRanges
from .verify import DEFAULT_FOREST_PARAMS, ForestParams

CONFIG_NAME = "config.json"


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 20
    n_chars: int = 1000
    sessions_per_keyboard: int = 2
    nu: float = 0.1
    gamma: object = "median"  # positive float, or "median" for the heuristic
    threshold: float = 0.7
    ocsvm_transform: str = "per-session"
    rf_cv: str = "blocked"
    forest: ForestParams = DEFAULT_FOREST_PARAMS
    ranges: tuple = DEFAULT_PROFILE_RANGES

    def __post_init__(self):
        if self.n_chars < 1:
            raise ValueError("n_chars must be at least 1")
        if self.sessions_per_keyboard < 1:
            raise ValueError("sessions_per_keyboard must be at least 1")
        if not 0 < self.nu <= 1:
            raise ValueError("nu must be in (0, 1]")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_chars": self.n_chars,
            "sessions_per_keyboard": self.sessions_per_keyboard,
            "nu": self.nu,
            "gamma": self.gamma,
            "threshold": self.threshold,
            "ocsvm_transform": self.ocsvm_transform,
            "rf_cv": self.rf_cv,
            "forest": dataclasses.asdict(self.forest),
            "ranges": [
                {
                    "agent_id": r.agent_id,
                    "wpm": list(r.wpm),
                    "error_rate": list(r.error_rate),
                    "fatigue_factor": list(r.fatigue_factor),
                    "finger_agility": list(r.finger_agility),
                    "dominant_hand": r.dominant_hand,
                }
                for r in self.ranges
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(doc)
        if "forest" in kwargs:
            kwargs["forest"] = ForestParams(**kwargs["forest"])
        if "ranges" in kwargs:
            kwargs["ranges"] = tuple(
                ProfileRanges(
                    agent_id=r["agent_id"],
                    wpm=tuple(r["wpm"]),
                    error_rate=tuple(r["error_rate"]),
                    fatigue_factor=tuple(r["fatigue_factor"]),
                    finger_agility=tuple(r["finger_agility"]),
                    dominant_hand=r["dominant_hand"],
                )
                for r in kwargs["ranges"]
            )
        return cls(**kwargs)

    def save(self, path) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
