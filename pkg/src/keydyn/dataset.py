"""Session CSV serialization and the experiment grid.

One session file holds one agent's event stream on one keyboard, one row
per press/release, with the agent's profile echoed on every row:

    Timestamp (ms),Key,Action,Keyboard type,Agent id,wpm,Error rate,
    Fatigue factor,Finger agility,Dominant hand

Timestamps are rendered with at most two decimal places; profile scalars
keep full precision so a file round-trips byte-identically through
read_session followed by write_session.
"""

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .keyboard import KEYBOARD_KINDS, keyboard_model
from .profiles import AgentProfile, agent_label, parse_agent_label
from .seeding import derive_seed
from .simulator import (
    DEFAULT_SIM_CONFIG,
    PRESS,
    RELEASE,
    KeystrokeEvent,
    SimConfig,
    build_personal_matrix,
    matrix_rng,
    simulate_session,
)

SESSION_HEADER = [
    "Timestamp (ms)",
    "Key",
    "Action",
    "Keyboard type",
    "Agent id",
    "wpm",
    "Error rate",
    "Fatigue factor",
    "Finger agility",
    "Dominant hand",
]

MANIFEST_NAME = "manifest.json"


class SchemaError(ValueError):
    """A session file violates the expected schema."""


def format_timestamp(ms: float) -> str:
    """Render with at most two decimals, trimming trailing zeros."""
    s = f"{ms:.2f}".rstrip("0").rstrip(".")
    return s or "0"


@dataclass(frozen=True)
class SessionData:
    """Events of one session plus the profile echoed in its rows."""

    events: tuple
    profile: AgentProfile

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


def write_session(path, events, profile: AgentProfile) -> None:
    """Write one session CSV; the profile must be bound to a keyboard."""
    if profile.keyboard is None:
        raise ValueError("profile is not bound to a keyboard")
    echo = [
        profile.keyboard.kind,
        agent_label(profile.agent_id),
        repr(profile.wpm),
        repr(profile.error_rate),
        repr(profile.fatigue_factor),
        repr(profile.finger_agility),
        profile.dominant_hand,
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SESSION_HEADER)
        for ev in events:
            writer.writerow([format_timestamp(ev.timestamp_ms), ev.key, ev.action] + echo)


def _parse_float(value, what, path, lineno):
    try:
        return float(value)
    except ValueError:
        raise SchemaError(f"{path}: line {lineno}: {what} {value!r} is not a number") from None


def read_session(path) -> SessionData:
    """Parse and validate one session CSV.

    Checks the header, field count, timestamp monotonicity, press/release
    pairing per key, and that profile echo columns are constant; every
    complaint names the offending line (header is line 1).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if header != SESSION_HEADER:
            raise SchemaError(
                f"{path}: line 1: header {header!r} does not match the "
                f"session schema {SESSION_HEADER!r}"
            )

        events = []
        echo = None
        prev_ts = None
        open_press = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(SESSION_HEADER):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(SESSION_HEADER)} "
                    f"fields, got {len(row)}"
                )
            ts = _parse_float(row[0], "timestamp", path, lineno)
            key, action = row[1], row[2]
            if action not in (PRESS, RELEASE):
                raise SchemaError(f"{path}: line {lineno}: bad action {action!r}")
            if prev_ts is not None and ts < prev_ts:
                raise SchemaError(
                    f"{path}: line {lineno}: timestamp {ts} decreases below {prev_ts}"
                )
            prev_ts = ts
            if action == PRESS:
                if key in open_press:
                    raise SchemaError(
                        f"{path}: line {lineno}: key {key!r} pressed again "
                        f"before its release (open press at line {open_press[key]})"
                    )
                open_press[key] = lineno
            else:
                if key not in open_press:
                    raise SchemaError(
                        f"{path}: line {lineno}: release of {key!r} without a press"
                    )
                del open_press[key]
            if echo is None:
                echo = (row[3:], lineno)
            elif row[3:] != echo[0]:
                raise SchemaError(
                    f"{path}: line {lineno}: profile echo columns changed "
                    f"(first seen on line {echo[1]})"
                )
            events.append(KeystrokeEvent(ts, key, action))

        if open_press:
            key, lineno = next(iter(open_press.items()))
            raise SchemaError(
                f"{path}: line {lineno}: press of {key!r} never released"
            )
        if echo is None:
            raise SchemaError(f"{path}: no event rows")

    (kind, label, wpm, err, fatigue, agility, hand), first_line = echo
    if kind not in KEYBOARD_KINDS:
        raise SchemaError(f"{path}: line {first_line}: unknown keyboard type {kind!r}")
    profile = AgentProfile(
        agent_id=parse_agent_label(label),
        wpm=_parse_float(wpm, "wpm", path, first_line),
        error_rate=_parse_float(err, "error rate", path, first_line),
        fatigue_factor=_parse_float(fatigue, "fatigue factor", path, first_line),
        finger_agility=_parse_float(agility, "finger agility", path, first_line),
        dominant_hand=hand,
        keyboard=keyboard_model(kind),
    )
    return SessionData(events=tuple(events), profile=profile)


def session_filename(agent_id: int, keyboard: str, session: int) -> str:
    return f"{agent_label(agent_id)}_{keyboard}_s{session}.csv"


def session_seed(seed: int, agent_id: int, keyboard: str, session: int) -> int:
    """Per-session sub-seed; stable when agents or sessions are added."""
    return derive_seed(seed, "session", agent_id, keyboard, session)


def generate_grid(profiles, out_dir, *, sessions_per_keyboard: int = 2,
                  n_chars: int = 1000, seed: int = 0,
                  keyboards=KEYBOARD_KINDS,
                  base_cfg: SimConfig = DEFAULT_SIM_CONFIG) -> dict:
    """Simulate the full agent x keyboard x session grid into a directory.

    Each session gets its own sub-seed; each agent's personal matrix is
    derived once from (seed, agent) and reused across all of that agent's
    sessions and keyboards. Returns the manifest, also written to
    manifest.json in the output directory.
    """
    if not profiles:
        raise ValueError("profiles must be non-empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sessions = []
    for profile in profiles:
        matrix = build_personal_matrix(
            profile, None, matrix_rng(seed, profile.agent_id)
        )
        for kind in keyboards:
            bound = profile.with_keyboard(keyboard_model(kind))
            for s in range(1, sessions_per_keyboard + 1):
                sub = session_seed(seed, profile.agent_id, kind, s)
                cfg = dataclasses.replace(base_cfg, seed=sub)
                events = simulate_session(bound, n_chars, cfg, matrix=matrix)
                name = session_filename(profile.agent_id, kind, s)
                write_session(out / name, events, bound)
                sessions.append({
                    "agent_id": profile.agent_id,
                    "keyboard": kind,
                    "session": s,
                    "path": name,
                    "seed": sub,
                    "n_events": len(events),
                })

    manifest = {
        "seed": seed,
        "n_chars": n_chars,
        "sessions_per_keyboard": sessions_per_keyboard,
        "keyboards": list(keyboards),
        "agents": [
            {
                "agent_id": p.agent_id,
                "wpm": p.wpm,
                "error_rate": p.error_rate,
                "fatigue_factor": p.fatigue_factor,
                "finger_agility": p.finger_agility,
                "dominant_hand": p.dominant_hand,
            }
            for p in profiles
        ],
        "sessions": sessions,
    }
    validate_manifest(manifest)
    with open(out / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def validate_manifest(manifest: dict) -> None:
    """Check the manifest covers the full grid with no duplicates."""
    for field in ("seed", "keyboards", "agents", "sessions", "sessions_per_keyboard"):
        if field not in manifest:
            raise SchemaError(f"manifest is missing {field!r}")
    agent_ids = [a["agent_id"] for a in manifest["agents"]]
    if len(set(agent_ids)) != len(agent_ids):
        raise SchemaError("manifest lists duplicate agent ids")
    triples = [(s["agent_id"], s["keyboard"], s["session"]) for s in manifest["sessions"]]
    if len(set(triples)) != len(triples):
        raise SchemaError("manifest lists duplicate (agent, keyboard, session) triples")
    expected = {
        (a, k, s)
        for a in agent_ids
        for k in manifest["keyboards"]
        for s in range(1, manifest["sessions_per_keyboard"] + 1)
    }
    if set(triples) != expected:
        missing = sorted(expected - set(triples))
        raise SchemaError(f"manifest does not cover the grid; missing {missing}")


def load_manifest(directory) -> dict:
    path = Path(directory) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {directory}")
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    validate_manifest(manifest)
    return manifest


def manifest_sessions(manifest: dict, *, agent_id=None, keyboard=None, session=None):
    """Filter session entries by any combination of grid coordinates."""
    out = []
    for entry in manifest["sessions"]:
        if agent_id is not None and entry["agent_id"] != agent_id:
            continue
        if keyboard is not None and entry["keyboard"] != keyboard:
            continue
        if session is not None and entry["session"] != session:
            continue
        out.append(entry)
    return out
