"""Keyboard hardware models and QWERTY grid geometry.

Keys live on an integer (row, col) grid: row 0 is the number row with the
backquote at (0, 0) and backspace at the top right, rows 1-3 are the three
letter rows, and the space bar sits centered on row 4. Distances between
keys are plain Euclidean distances on this grid.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

BACKSPACE = "BACKSPACE"
SPACE = " "

#: Multiplier applied in place of the normalized distance when a key is
#: repeated, reflecting the much shorter movement for a double letter.
REPEATED_KEY_DISTANCE = 0.2


class UnknownKeyError(KeyError):
    """Raised when a key is not present in the keyboard geometry."""

    def __init__(self, key):
        super().__init__(key)
        self.key = key

    def __str__(self):
        return f"key {self.key!r} is not in the keyboard layout"


@dataclass(frozen=True)
class KeyboardModel:
    """Physical keyboard class with its timing baselines (milliseconds)."""

    kind: str
    base_flight_ms: float
    base_dwell_ms: float

    def __post_init__(self):
        if self.kind not in ("laptop", "mechanical"):
            raise ValueError(f"unknown keyboard kind {self.kind!r}")
        if self.base_flight_ms <= 0 or self.base_dwell_ms <= 0:
            raise ValueError("keyboard timing baselines must be positive")


#: Laptop (membrane) keys rebound faster but travel between keys is slower.
LAPTOP = KeyboardModel(kind="laptop", base_flight_ms=120.0, base_dwell_ms=50.0)
MECHANICAL = KeyboardModel(kind="mechanical", base_flight_ms=100.0, base_dwell_ms=60.0)

KEYBOARD_KINDS = ("laptop", "mechanical")


def keyboard_model(kind: str) -> KeyboardModel:
    if kind == "laptop":
        return LAPTOP
    if kind == "mechanical":
        return MECHANICAL
    raise ValueError(f"unknown keyboard kind {kind!r}")


def _build_qwerty():
    layout = {"`": (0, 0)}
    for col, ch in enumerate("1234567890", start=1):
        layout[ch] = (0, col)
    layout[BACKSPACE] = (0, 13)
    for col, ch in enumerate("qwertyuiop", start=1):
        layout[ch] = (1, col)
    for col, ch in enumerate("asdfghjkl", start=1):
        layout[ch] = (2, col)
    for col, ch in enumerate("zxcvbnm", start=1):
        layout[ch] = (3, col)
    layout[SPACE] = (4, 5)
    return layout


QWERTY_LAYOUT = _build_qwerty()

# Columns of the T-G-B and Y-H-N key stacks; keys strictly left of the
# former are struck by the left hand, strictly right of the latter by the
# right hand, and the two middle columns by either.
_LEFT_BOUNDARY_COL = 5
_RIGHT_BOUNDARY_COL = 6


class KeyboardGeometry:
    """Maps keys to grid coordinates and answers distance queries."""

    def __init__(self, layout=None):
        self.layout = dict(layout) if layout is not None else dict(QWERTY_LAYOUT)
        if len(set(self.layout.values())) != len(self.layout):
            raise ValueError("key coordinates must be unique")
        self.keys = tuple(self.layout)
        self._max_distance = max(
            self.raw_distance(a, b) for a in self.keys for b in self.keys
        )

    @property
    def max_pair_distance(self) -> float:
        return self._max_distance

    def position(self, key):
        try:
            return self.layout[key]
        except KeyError:
            raise UnknownKeyError(key) from None

    def raw_distance(self, key_a, key_b) -> float:
        """Euclidean grid distance, before normalization."""
        ra, ca = self.position(key_a)
        rb, cb = self.position(key_b)
        return math.hypot(ra - rb, ca - cb)

    def hand_side(self, key) -> str:
        """'left', 'right', or 'neutral' for the middle column pair."""
        _, col = self.position(key)
        if col < _LEFT_BOUNDARY_COL:
            return "left"
        if col > _RIGHT_BOUNDARY_COL:
            return "right"
        return "neutral"

    def neighbor_keys(self, key, radius: float = 1.5):
        """Keys within `radius` grid units of `key`, candidates for typos.

        Excludes the key itself and backspace (a stray backspace would not
        read as a character mistyped and then corrected).
        """
        center = self.position(key)
        out = []
        for other, pos in self.layout.items():
            if other == key or other == BACKSPACE:
                continue
            if math.hypot(center[0] - pos[0], center[1] - pos[1]) <= radius:
                out.append(other)
        return out


@lru_cache(maxsize=1)
def default_geometry() -> KeyboardGeometry:
    return KeyboardGeometry()


def key_distance(geom: KeyboardGeometry, key_a, key_b,
                 repeated_distance: float = REPEATED_KEY_DISTANCE) -> float:
    """Normalized distance between two keys, in (0, 1].

    Raw Euclidean distance divided by the largest key-pair distance of the
    layout; a repeated key short-circuits to `repeated_distance`.
    """
    if key_a == key_b:
        geom.position(key_a)  # still validate the key
        return repeated_distance
    return geom.raw_distance(key_a, key_b) / geom.max_pair_distance
