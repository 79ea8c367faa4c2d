"""Character source for free-text sessions.

Agents type a stream of characters drawn from a unigram frequency table
over the lowercase letters plus space, approximating English letter usage.
"""

import numpy as np

#: Relative letter frequencies in running English text (per-letter share,
#: ignoring spaces). Standard corpus values.
LETTER_WEIGHTS = {
    "a": 0.08167, "b": 0.01492, "c": 0.02782, "d": 0.04253, "e": 0.12702,
    "f": 0.02228, "g": 0.02015, "h": 0.06094, "i": 0.06966, "j": 0.00153,
    "k": 0.00772, "l": 0.04025, "m": 0.02406, "n": 0.06749, "o": 0.07507,
    "p": 0.01929, "q": 0.00095, "r": 0.05987, "s": 0.06327, "t": 0.09056,
    "u": 0.02758, "v": 0.00978, "w": 0.02360, "x": 0.00150, "y": 0.01974,
    "z": 0.00074,
}

#: Fraction of typed characters that are the space bar (roughly one space
#: per five-letter word).
SPACE_SHARE = 0.18


class FrequencyTable:
    """Normalized character distribution sampled by inverse CDF."""

    def __init__(self, freq: dict):
        if not freq:
            raise ValueError("frequency table needs at least one character")
        items = sorted(freq.items())
        probs = np.array([w for _, w in items], dtype=float)
        if np.any(probs < 0):
            raise ValueError("character weights must be non-negative")
        total = probs.sum()
        if total <= 0:
            raise ValueError("character weights must sum to a positive value")
        probs = probs / total
        self.chars = tuple(c for c, _ in items)
        self.freq = {c: float(p) for c, p in zip(self.chars, probs)}
        self._cum = np.cumsum(probs)
        # cumsum of a normalized vector can land at 1 - epsilon; pin the top
        # so a uniform draw can never fall past the last bucket.
        self._cum[-1] = 1.0

    def __len__(self):
        return len(self.chars)

    def sample(self, rng: np.random.Generator) -> str:
        """Draw one character, consuming exactly one uniform variate."""
        u = rng.random()
        return self.chars[int(np.searchsorted(self._cum, u, side="right"))]


def english_frequencies(space_share: float = SPACE_SHARE) -> FrequencyTable:
    """Letters a-z scaled to (1 - space_share), plus the space key."""
    if not 0 <= space_share < 1:
        raise ValueError("space_share must be in [0, 1)")
    letter_total = sum(LETTER_WEIGHTS.values())
    scale = (1.0 - space_share) / letter_total
    freq = {c: w * scale for c, w in LETTER_WEIGHTS.items()}
    freq[" "] = space_share
    return FrequencyTable(freq)


def sample_character(table: FrequencyTable, rng: np.random.Generator) -> str:
    return table.sample(rng)
