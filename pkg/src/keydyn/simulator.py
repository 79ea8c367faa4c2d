"""Agent-based keystroke generator.

One agent types one session as a sequence of press/release events. Flight
time between two keys is the keyboard's baseline stretched by typing speed,
key distance, a personal per-key-pair factor, fatigue, and multiplicative
noise:

    flight = B_eff * (0.5 + D / 2) * P[prev, key] * (1 + 0.4 * phi^2) * N

where B_eff = base_flight * (40 / wpm_current) / finger_agility, D is the
normalized key distance, phi the fatigue level, and N ~ Normal(1, 0.05)
truncated positive. Fatigue accumulates once per intended character and
simultaneously drags the working speed:

    phi' = min(1, phi + gamma)
    wpm_current = wpm_base * (1 - 0.3 * phi^2)

Typos follow a fixed correction shape: a neighboring key is struck, then
backspace, then the intended key.
"""

from dataclasses import dataclass, field

import numpy as np

from .keyboard import (
    BACKSPACE,
    KeyboardGeometry,
    default_geometry,
    key_distance,
)
from .profiles import AgentProfile
from .seeding import derive_seed
from .text import FrequencyTable, english_frequencies

#: Highest-frequency English digraphs; pairs an experienced typist rolls
#: faster than their distance alone would predict.
COMMON_DIGRAPHS = frozenset(
    ["th", "he", "in", "er", "an", "re", "on", "at", "en", "nd"]
)

DIGRAPH_FACTOR = 0.85
DOMINANT_HAND_FACTOR = 0.9
NON_DOMINANT_HAND_FACTOR = 1.05

#: Quadratic fatigue penalty on flight time.
FATIGUE_FLIGHT_PENALTY = 0.4
#: Quadratic fatigue penalty on working typing speed.
FATIGUE_WPM_PENALTY = 0.3

#: Typing speed at which a keyboard's base flight time holds as-is.
REFERENCE_WPM = 40.0
#: Wrong-character candidates are keys within this raw grid distance.
TYPO_RADIUS = 1.5
#: Floor for every sampled duration, keeping event order strict.
MIN_DURATION_MS = 1.0

PRESS = "press"
RELEASE = "release"


@dataclass(frozen=True)
class SimConfig:
    """Seed plus session-level noise knobs shared by every agent."""

    seed: int = 0
    noise_mean: float = 1.0
    noise_sd: float = 0.05
    dwell_sd_ms: float = 5.0
    backspace_dwell_mean_ms: float = 40.0
    backspace_dwell_sd_ms: float = 3.0
    repeated_key_distance: float = 0.2

    def __post_init__(self):
        if self.noise_sd < 0 or self.dwell_sd_ms < 0 or self.backspace_dwell_sd_ms < 0:
            raise ValueError("noise spreads must be non-negative")
        if self.repeated_key_distance <= 0:
            raise ValueError("repeated_key_distance must be positive")


DEFAULT_SIM_CONFIG = SimConfig()


@dataclass
class SimState:
    """Mutable per-session typing state."""

    wpm_base: float
    fatigue: float = 0.0
    clock_ms: float = 0.0
    prev_key: str | None = None
    wpm_current: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.fatigue <= 1:
            raise ValueError("fatigue must be in [0, 1]")
        self.wpm_current = self.wpm_base * (
            1.0 - FATIGUE_WPM_PENALTY * self.fatigue ** 2
        )


@dataclass(frozen=True)
class KeystrokeEvent:
    """One raw press or release with an absolute session timestamp."""

    timestamp_ms: float
    key: str
    action: str

    def __post_init__(self):
        if self.action not in (PRESS, RELEASE):
            raise ValueError(f"action must be press or release, got {self.action!r}")


@dataclass(frozen=True)
class PersonalMatrix:
    """Per-agent multiplicative factor for every ordered key pair.

    The three components are kept alongside their product so a factor can
    always be audited: base variation Normal(1.0, 0.15) clipped to
    [0.7, 1.3], a hand factor (0.9 when both keys sit under the dominant
    hand, 1.05 when both sit under the other hand, 1.0 otherwise), and
    0.85 for common digraphs.
    """

    agent_id: int
    v_base: dict
    v_hand: dict
    v_digraph: dict
    factor: dict

    def __getitem__(self, pair) -> float:
        return self.factor[pair]

    def __len__(self):
        return len(self.factor)


def build_personal_matrix(profile: AgentProfile, geometry: KeyboardGeometry | None,
                          rng: np.random.Generator) -> PersonalMatrix:
    """Draw the agent's key-pair factors from the given stream.

    The factor map depends only on the stream and the agent's handedness,
    not on the keyboard hardware, so one matrix serves the agent across
    keyboards and sessions.
    """
    geom = geometry or default_geometry()
    keys = geom.keys
    n = len(keys)
    base = np.clip(rng.normal(1.0, 0.15, size=n * n), 0.7, 1.3)

    dominant = profile.dominant_hand
    other = "left" if dominant == "right" else "right"
    sides = {k: geom.hand_side(k) for k in keys}

    v_base, v_hand, v_digraph, factor = {}, {}, {}, {}
    idx = 0
    for a in keys:
        for b in keys:
            pair = (a, b)
            vb = float(base[idx])
            idx += 1
            if sides[a] == dominant and sides[b] == dominant:
                vh = DOMINANT_HAND_FACTOR
            elif sides[a] == other and sides[b] == other:
                vh = NON_DOMINANT_HAND_FACTOR
            else:
                vh = 1.0
            vd = DIGRAPH_FACTOR if a + b in COMMON_DIGRAPHS else 1.0
            v_base[pair] = vb
            v_hand[pair] = vh
            v_digraph[pair] = vd
            factor[pair] = vb * vh * vd
    return PersonalMatrix(profile.agent_id, v_base, v_hand, v_digraph, factor)


def matrix_rng(seed: int, agent_id: int) -> np.random.Generator:
    """Stream for one agent's personal matrix, independent of sessions."""
    return np.random.default_rng(derive_seed(seed, "matrix", agent_id))


def _positive_noise(rng, mean, sd):
    # Normal(mean, sd) truncated to positive support; at sd=0.05 the redraw
    # is effectively unreachable but keeps the factor sign-safe.
    while True:
        n = rng.normal(mean, sd)
        if n > 0:
            return n


def update_fatigue(state: SimState, gamma: float) -> SimState:
    """Advance fatigue one step and refresh the working speed."""
    state.fatigue = min(1.0, state.fatigue + gamma)
    state.wpm_current = state.wpm_base * (
        1.0 - FATIGUE_WPM_PENALTY * state.fatigue ** 2
    )
    return state


def flight_time(cfg: SimConfig, profile: AgentProfile, matrix: PersonalMatrix,
                state: SimState, k_i: str, k_j: str, rng,
                geometry: KeyboardGeometry | None = None) -> float:
    """Milliseconds between releasing k_i and pressing k_j."""
    kb = profile.keyboard
    if kb is None:
        raise ValueError("profile is not bound to a keyboard")
    geom = geometry or default_geometry()
    d = key_distance(geom, k_i, k_j, repeated_distance=cfg.repeated_key_distance)
    b_eff = kb.base_flight_ms * (REFERENCE_WPM / state.wpm_current)
    b_eff /= profile.finger_agility
    f = b_eff * (0.5 + d / 2.0)
    f *= matrix[(k_i, k_j)]
    f *= 1.0 + FATIGUE_FLIGHT_PENALTY * state.fatigue ** 2
    f *= _positive_noise(rng, cfg.noise_mean, cfg.noise_sd)
    return max(f, MIN_DURATION_MS)


def dwell_time(cfg: SimConfig, keyboard, key: str, rng) -> float:
    """Milliseconds the key is held down."""
    if key == BACKSPACE:
        d = rng.normal(cfg.backspace_dwell_mean_ms, cfg.backspace_dwell_sd_ms)
    else:
        d = rng.normal(keyboard.base_dwell_ms, cfg.dwell_sd_ms)
    return max(d, MIN_DURATION_MS)


def simulate_session(profile: AgentProfile, n_chars: int,
                     cfg: SimConfig = DEFAULT_SIM_CONFIG, *,
                     matrix: PersonalMatrix | None = None,
                     geometry: KeyboardGeometry | None = None,
                     frequencies: FrequencyTable | None = None) -> list:
    """Type `n_chars` intended characters and return the raw event stream.

    The event stream is a pure function of (profile, n_chars, cfg.seed)
    plus the personal matrix; when no matrix is passed, one is derived
    from the same seed and the agent id. Events come out in strict
    timestamp order, press and release alternating; backspaces appear only
    as the middle keystroke of a correction triplet.
    """
    if profile.keyboard is None:
        raise ValueError("profile is not bound to a keyboard")
    if n_chars < 1:
        raise ValueError("n_chars must be at least 1")
    geom = geometry or default_geometry()
    table = frequencies or english_frequencies()
    if matrix is None:
        matrix = build_personal_matrix(
            profile, geom, matrix_rng(cfg.seed, profile.agent_id)
        )
    rng = np.random.default_rng(derive_seed(cfg.seed, "events"))

    state = SimState(wpm_base=profile.wpm)
    events = []

    def strike(key):
        if state.prev_key is None:
            press = state.clock_ms
        else:
            press = state.clock_ms + flight_time(
                cfg, profile, matrix, state, state.prev_key, key, rng, geom
            )
        release = press + dwell_time(cfg, profile.keyboard, key, rng)
        events.append(KeystrokeEvent(press, key, PRESS))
        events.append(KeystrokeEvent(release, key, RELEASE))
        state.clock_ms = release
        state.prev_key = key

    for _ in range(n_chars):
        intended = table.sample(rng)
        mistype = rng.random() < profile.error_rate
        if mistype:
            candidates = geom.neighbor_keys(intended, radius=TYPO_RADIUS)
            if candidates:
                wrong = candidates[int(rng.integers(len(candidates)))]
                strike(wrong)
                strike(BACKSPACE)
        strike(intended)
        update_fatigue(state, profile.fatigue_factor)

    return events
