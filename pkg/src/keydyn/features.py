"""Sliding-window feature extraction from raw event streams.

Presses are paired with their releases into keystrokes, then aggregated
over 5-second windows stepped every second into five features: mean and
std of dwell time, mean and std of flight time, and the backspace share
as a percentage. Std is the population variant throughout.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .keyboard import BACKSPACE
from .simulator import PRESS, RELEASE

WINDOW_MS = 5000.0
STEP_MS = 1000.0

FEATURE_NAMES = ("avg_dwell", "std_dwell", "avg_flight", "std_flight", "error_rate_pct")
#: Compact feature tags used in report tables.
FEATURE_TAGS = ("ad", "sd", "af", "sf", "er")

FEATURE_HEADER = [
    "Window start ms",
    "Window end ms",
    "avg_dwell",
    "std_dwell",
    "avg_flight",
    "std_flight",
    "error rate",
    "sparse",
]


class PairingError(ValueError):
    """Event stream cannot be paired into keystrokes."""


@dataclass(frozen=True)
class Keystroke:
    """One completed key press with its hold and approach durations."""

    key: str
    press_ms: float
    release_ms: float
    flight_ms: float | None  # press minus previous release; None for the first

    def __post_init__(self):
        if not self.release_ms > self.press_ms:
            raise ValueError("release must come after press")

    @property
    def dwell_ms(self) -> float:
        return self.release_ms - self.press_ms


@dataclass(frozen=True)
class FeatureWindow:
    """Five features over one fixed-length window.

    Windows holding fewer than two keystrokes are flagged sparse; their
    stats cover whatever values exist and are NaN where nothing does.
    """

    window_start_ms: float
    window_end_ms: float
    avg_dwell: float
    std_dwell: float
    avg_flight: float
    std_flight: float
    error_rate_pct: float
    sparse: bool
    n_keystrokes: int | None = None

    def values(self) -> tuple:
        return (self.avg_dwell, self.std_dwell, self.avg_flight,
                self.std_flight, self.error_rate_pct)


def pair_events(events) -> list:
    """Match presses to releases; keystrokes come out in press order.

    Keys may interleave (rollover), but one key cannot be pressed twice
    without an intervening release. Flight time is each press minus the
    previous keystroke's release, in press order; the first keystroke has
    none.
    """
    open_press = {}
    strokes = []
    prev_ts = None
    for ev in events:
        if prev_ts is not None and ev.timestamp_ms < prev_ts:
            raise PairingError(
                f"events out of order at t={ev.timestamp_ms}"
            )
        prev_ts = ev.timestamp_ms
        if ev.action == PRESS:
            if ev.key in open_press:
                raise PairingError(
                    f"key {ev.key!r} pressed again at t={ev.timestamp_ms} "
                    f"before its release"
                )
            open_press[ev.key] = ev.timestamp_ms
        elif ev.action == RELEASE:
            if ev.key not in open_press:
                raise PairingError(
                    f"release of {ev.key!r} at t={ev.timestamp_ms} without a press"
                )
            strokes.append((open_press.pop(ev.key), ev.timestamp_ms, ev.key))
        else:
            raise PairingError(f"unknown action {ev.action!r} at t={ev.timestamp_ms}")
    if open_press:
        key, ts = min(open_press.items(), key=lambda kv: kv[1])
        raise PairingError(f"press of {key!r} at t={ts} never released")

    strokes.sort(key=lambda s: s[0])
    out = []
    prev_release = None
    for press, release, key in strokes:
        flight = None if prev_release is None else press - prev_release
        out.append(Keystroke(key, press, release, flight))
        prev_release = release
    return out


def _stats(values):
    if len(values) == 0:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def extract_windows(keystrokes, window_ms: float = WINDOW_MS,
                    step_ms: float = STEP_MS) -> list:
    """Aggregate keystrokes into overlapping fixed-length windows.

    Windows start at 0 and step by step_ms; the last one is the final
    window whose end does not pass the last event time. A keystroke
    belongs to every window covering its press timestamp (end exclusive).
    """
    if window_ms <= 0 or step_ms <= 0:
        raise ValueError("window_ms and step_ms must be positive")
    keystrokes = list(keystrokes)
    if not keystrokes:
        return []
    presses = np.array([k.press_ms for k in keystrokes])
    if np.any(np.diff(presses) < 0):
        raise ValueError("keystrokes must be ordered by press time")
    last_event = max(k.release_ms for k in keystrokes)
    if last_event < window_ms:
        return []
    n_windows = int((last_event - window_ms) // step_ms) + 1

    windows = []
    for i in range(n_windows):
        start = i * step_ms
        end = start + window_ms
        lo = int(np.searchsorted(presses, start, side="left"))
        hi = int(np.searchsorted(presses, end, side="left"))
        members = keystrokes[lo:hi]
        n = len(members)
        avg_dwell, std_dwell = _stats([k.dwell_ms for k in members])
        avg_flight, std_flight = _stats(
            [k.flight_ms for k in members if k.flight_ms is not None]
        )
        if n:
            backspaces = sum(1 for k in members if k.key == BACKSPACE)
            error_rate = 100.0 * backspaces / n
        else:
            error_rate = 0.0
        windows.append(FeatureWindow(
            window_start_ms=start,
            window_end_ms=end,
            avg_dwell=avg_dwell,
            std_dwell=std_dwell,
            avg_flight=avg_flight,
            std_flight=std_flight,
            error_rate_pct=error_rate,
            sparse=n < 2,
            n_keystrokes=n,
        ))
    return windows


def features_to_matrix(windows, include_sparse: bool = False) -> np.ndarray:
    """Stack window features into an (n, 5) array, dropping sparse rows."""
    rows = [w.values() for w in windows if include_sparse or not w.sparse]
    if not rows:
        return np.empty((0, len(FEATURE_NAMES)))
    return np.array(rows, dtype=float)


def _render(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def write_features(path, windows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FEATURE_HEADER)
        for w in windows:
            writer.writerow([
                _render(w.window_start_ms),
                _render(w.window_end_ms),
                _render(w.avg_dwell),
                _render(w.std_dwell),
                _render(w.avg_flight),
                _render(w.std_flight),
                _render(w.error_rate_pct),
                "true" if w.sparse else "false",
            ])


def _parse(cell: str) -> float:
    return math.nan if cell == "" else float(cell)


def read_features(path) -> list:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        if header != FEATURE_HEADER:
            raise ValueError(f"{path}: header does not match the feature schema")
        windows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(FEATURE_HEADER):
                raise ValueError(f"{path}: line {lineno}: bad field count")
            if row[7] not in ("true", "false"):
                raise ValueError(f"{path}: line {lineno}: bad sparse flag {row[7]!r}")
            windows.append(FeatureWindow(
                window_start_ms=float(row[0]),
                window_end_ms=float(row[1]),
                avg_dwell=_parse(row[2]),
                std_dwell=_parse(row[3]),
                avg_flight=_parse(row[4]),
                std_flight=_parse(row[5]),
                error_rate_pct=_parse(row[6]),
                sparse=row[7] == "true",
            ))
    return windows


def feature_filename(agent_id: int, keyboard: str, session: int) -> str:
    return f"user{agent_id}_{keyboard}_s{session}_features.csv"


def load_grid_features(manifest: dict, features_dir) -> dict:
    """Load per-session feature matrices for classifier and test input.

    Returns {(agent_id, keyboard, session): (n_windows, 5) array} with
    sparse windows already dropped.
    """
    features_dir = Path(features_dir)
    out = {}
    for entry in manifest["sessions"]:
        key = (entry["agent_id"], entry["keyboard"], entry["session"])
        path = features_dir / feature_filename(*key)
        windows = read_features(path)
        out[key] = features_to_matrix(windows)
    return out
