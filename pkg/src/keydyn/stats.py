"""Two-sample distribution testing over per-feature window series.

The Kolmogorov-Smirnov statistic is the largest gap between the two
empirical CDFs, evaluated at every pooled data point so ties are handled
exactly. Its p-value uses the asymptotic Kolmogorov distribution with the
standard small-sample correction:

    n_e = n * m / (n + m)
    lambda = (sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) * D
    p = 2 * sum_{k>=1} (-1)^(k-1) * exp(-2 * k^2 * lambda^2)

truncated once terms drop below 1e-10 and clamped to [0, 1].
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .features import FEATURE_NAMES, FEATURE_TAGS


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n: int
    m: int


def _kolmogorov_sf(lam: float) -> float:
    if lam <= 0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = 2.0 * math.exp(-2.0 * (k * lam) ** 2)
        total += sign * term
        sign = -sign
        if term < 1e-10:
            return min(1.0, max(0.0, total))
    # Series is useless this deep into the small-lambda regime; the
    # distributions are indistinguishable there anyway.
    return 1.0


def ks_two_sample(x, y) -> KsResult:
    """Two-sample KS test; both samples must be non-empty and finite."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise ValueError("both samples must be non-empty")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("samples must be finite")
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side="right") / n
    cdf_y = np.searchsorted(y, pooled, side="right") / m
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    ne = n * m / (n + m)
    lam = (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne)) * d
    return KsResult(statistic=d, p_value=_kolmogorov_sf(lam), n=n, m=m)


def compare_sessions_ks(feat_a: np.ndarray, feat_b: np.ndarray) -> dict:
    """Run the KS test per feature column of two (n, 5) matrices."""
    feat_a = np.asarray(feat_a, dtype=float)
    feat_b = np.asarray(feat_b, dtype=float)
    for mat in (feat_a, feat_b):
        if mat.ndim != 2 or mat.shape[1] != len(FEATURE_NAMES):
            raise ValueError(f"expected (n, {len(FEATURE_NAMES)}) feature matrices")
        if mat.shape[0] == 0:
            raise ValueError("feature series must be non-empty")
    return {
        name: ks_two_sample(feat_a[:, i], feat_b[:, i])
        for i, name in enumerate(FEATURE_NAMES)
    }


@dataclass(frozen=True)
class KsMatrix:
    """Pairwise per-feature p-values for one keyboard's sessions.

    Diagonal cells compare an agent's two sessions with each other;
    off-diagonal cells average the p-values of agent i's first session
    against each of agent j's two sessions.
    """

    keyboard: str
    agent_ids: tuple
    feature_names: tuple
    p_values: np.ndarray  # (agents, agents, features)


def ks_matrix(session_features: dict, keyboard: str, agent_ids=None) -> KsMatrix:
    """Assemble the pairwise KS table from per-session feature matrices.

    `session_features` maps (agent_id, keyboard, session) to an (n, 5)
    array, as produced by load_grid_features.
    """
    if agent_ids is None:
        agent_ids = sorted({a for a, k, s in session_features if k == keyboard})
    agent_ids = tuple(agent_ids)
    nf = len(FEATURE_NAMES)
    out = np.zeros((len(agent_ids), len(agent_ids), nf))

    def grab(agent, session):
        try:
            return session_features[(agent, keyboard, session)]
        except KeyError:
            raise KeyError(
                f"missing features for agent {agent} {keyboard} session {session}"
            ) from None

    for i, ai in enumerate(agent_ids):
        for j, aj in enumerate(agent_ids):
            if i == j:
                results = compare_sessions_ks(grab(ai, 1), grab(ai, 2))
                out[i, j] = [results[n].p_value for n in FEATURE_NAMES]
            else:
                r1 = compare_sessions_ks(grab(ai, 1), grab(aj, 1))
                r2 = compare_sessions_ks(grab(ai, 1), grab(aj, 2))
                out[i, j] = [
                    (r1[n].p_value + r2[n].p_value) / 2.0 for n in FEATURE_NAMES
                ]
    return KsMatrix(keyboard, agent_ids, FEATURE_NAMES, out)


@dataclass(frozen=True)
class CrossKeyboardKs:
    """Per-agent KS p-values between their two keyboards' sessions."""

    agent_ids: tuple
    feature_names: tuple
    p_values: np.ndarray  # (agents, features), mean over the 4 session pairs


def cross_keyboard_ks(session_features: dict, agent_ids=None,
                      keyboards=("laptop", "mechanical")) -> CrossKeyboardKs:
    ka, kb = keyboards
    if agent_ids is None:
        agent_ids = sorted({a for a, k, s in session_features if k == ka})
    agent_ids = tuple(agent_ids)
    nf = len(FEATURE_NAMES)
    out = np.zeros((len(agent_ids), nf))
    for i, agent in enumerate(agent_ids):
        acc = np.zeros(nf)
        count = 0
        for sa in (1, 2):
            for sb in (1, 2):
                res = compare_sessions_ks(
                    session_features[(agent, ka, sa)],
                    session_features[(agent, kb, sb)],
                )
                acc += [res[n].p_value for n in FEATURE_NAMES]
                count += 1
        out[i] = acc / count
    return CrossKeyboardKs(agent_ids, FEATURE_NAMES, out)


def write_ks_matrix_csv(path, matrix: KsMatrix) -> None:
    """One row per (agent, feature tag), one column per opposing agent."""
    labels = [f"user{a}" for a in matrix.agent_ids]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["agent", "feature"] + labels) + "\n")
        for i, ai in enumerate(matrix.agent_ids):
            for f, tag in enumerate(FEATURE_TAGS):
                cells = [f"{matrix.p_values[i, j, f]:.4f}"
                         for j in range(len(matrix.agent_ids))]
                fh.write(",".join([f"user{ai}", tag] + cells) + "\n")


def write_ks_matrix_json(path, matrix: KsMatrix) -> None:
    doc = {
        "keyboard": matrix.keyboard,
        "p_values": {
            f"user{ai}": {
                f"user{aj}": {
                    tag: round(float(matrix.p_values[i, j, f]), 4)
                    for f, tag in enumerate(FEATURE_TAGS)
                }
                for j, aj in enumerate(matrix.agent_ids)
            }
            for i, ai in enumerate(matrix.agent_ids)
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_cross_keyboard_csv(path, cross: CrossKeyboardKs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["agent"] + list(FEATURE_TAGS)) + "\n")
        for i, agent in enumerate(cross.agent_ids):
            cells = [f"{cross.p_values[i, f]:.4f}" for f in range(len(FEATURE_TAGS))]
            fh.write(",".join([f"user{agent}"] + cells) + "\n")
