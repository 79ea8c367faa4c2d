"""Agent typing profiles and the population they are drawn from.

A profile holds the behavioural scalars of one simulated typist. Concrete
values are drawn uniformly from per-user ranges, so regenerating with the
same seed reproduces the same population.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .keyboard import KeyboardModel
from .seeding import derive_seed


@dataclass(frozen=True)
class ProfileRanges:
    """Closed sampling intervals for one agent's behavioural scalars."""

    agent_id: int
    wpm: tuple
    error_rate: tuple
    fatigue_factor: tuple
    finger_agility: tuple
    dominant_hand: str

    def __post_init__(self):
        for name in ("wpm", "error_rate", "fatigue_factor", "finger_agility"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} range for agent {self.agent_id} is inverted")
        if self.dominant_hand not in ("left", "right"):
            raise ValueError("dominant_hand must be 'left' or 'right'")


#: Five-agent population spanning slow/careful through fast/error-prone
#: typists, including one left-handed agent and one fast-fatiguing agent.
DEFAULT_PROFILE_RANGES = (
    ProfileRanges(1, (50.0, 55.0), (0.03, 0.04), (1e-4, 3e-4), (0.9, 1.0), "left"),
    ProfileRanges(2, (65.0, 70.0), (0.01, 0.03), (1.5e-3, 3e-3), (1.0, 1.1), "right"),
    ProfileRanges(3, (40.0, 45.0), (0.02, 0.03), (1e-4, 3e-4), (0.8, 0.9), "right"),
    ProfileRanges(4, (80.0, 85.0), (0.08, 0.10), (1e-4, 3e-4), (1.2, 1.3), "right"),
    ProfileRanges(5, (30.0, 35.0), (0.01, 0.02), (1e-4, 3e-4), (0.7, 0.8), "right"),
)


@dataclass(frozen=True)
class AgentProfile:
    """One agent's sampled behavioural scalars, optionally bound to hardware."""

    agent_id: int
    wpm: float
    error_rate: float
    fatigue_factor: float
    finger_agility: float
    dominant_hand: str
    keyboard: KeyboardModel | None = None

    def __post_init__(self):
        if self.wpm <= 0:
            raise ValueError("wpm must be positive")
        if not 0 <= self.error_rate < 1:
            raise ValueError("error_rate must be in [0, 1)")
        if not 0 <= self.fatigue_factor <= 0.01:
            raise ValueError("fatigue_factor must be in [0, 0.01]")
        if self.finger_agility <= 0:
            raise ValueError("finger_agility must be positive")
        if self.dominant_hand not in ("left", "right"):
            raise ValueError("dominant_hand must be 'left' or 'right'")

    @property
    def label(self) -> str:
        return agent_label(self.agent_id)

    def with_keyboard(self, keyboard: KeyboardModel) -> "AgentProfile":
        return dataclasses.replace(self, keyboard=keyboard)


def agent_label(agent_id: int) -> str:
    """Render the id the way session files spell it, e.g. 2 -> 'user2'."""
    return f"user{agent_id}"


def parse_agent_label(label: str) -> int:
    if not label.startswith("user"):
        raise ValueError(f"agent label {label!r} does not look like 'user<N>'")
    try:
        return int(label[4:])
    except ValueError:
        raise ValueError(f"agent label {label!r} does not look like 'user<N>'") from None


def instantiate_profiles(ranges=DEFAULT_PROFILE_RANGES, seed: int = 0):
    """Sample a concrete population from per-agent ranges.

    One RNG stream covers the whole population; agents are drawn in id
    order, four scalars each (speed, error rate, fatigue, agility), so the
    draw for agent k never depends on how many agents follow.
    """
    rng = np.random.default_rng(derive_seed(seed, "profiles"))
    profiles = []
    for r in sorted(ranges, key=lambda r: r.agent_id):
        wpm = rng.uniform(*r.wpm)
        err = rng.uniform(*r.error_rate)
        fatigue = rng.uniform(*r.fatigue_factor)
        agility = rng.uniform(*r.finger_agility)
        profiles.append(AgentProfile(
            agent_id=r.agent_id,
            wpm=wpm,
            error_rate=err,
            fatigue_factor=fatigue,
            finger_agility=agility,
            dominant_hand=r.dominant_hand,
        ))
    return profiles
