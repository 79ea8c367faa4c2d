"""Session-pair classification: one-class inlier rates and forest verdicts.

Two pipelines operate on per-session feature matrices. The one-class
route z-scores, projects to two principal components, fits a one-class
SVM, and reports the percentage of test windows accepted as inliers. The
forest route pools two sessions as a binary classification problem,
cross-validates a random forest, and declares the sessions different
users when mean accuracy exceeds a threshold.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.metrics import f1_score
from sklearn.model_selection import StratifiedKFold

from .features import FEATURE_NAMES
from .ocsvm import OneClassSVM
from .preprocessing import PrincipalComponents, ZScoreScaler
from .seeding import derive_seed

SAME_USER = "same_user"
DIFFERENT_USER = "different_user"

#: Train/test session pairings of the four inlier-rate tables.
OCSVM_PAIRINGS = {
    "laptop1_laptop2": (("laptop", 1), ("laptop", 2)),
    "laptop2_mechanical2": (("laptop", 2), ("mechanical", 2)),
    "mechanical2_laptop1": (("mechanical", 2), ("laptop", 1)),
    "mechanical1_mechanical2": (("mechanical", 1), ("mechanical", 2)),
}

#: How each session is normalized before one-class scoring. "train" pushes
#: the training session's scaler and projection onto the test session;
#: "per-session" gives each session its own, comparing shapes rather than
#: absolute levels; "pooled" fits the transforms on both sessions jointly.
OCSVM_TRANSFORM_MODES = ("train", "per-session", "pooled")


def _seed32(*parts) -> int:
    return derive_seed(*parts) & 0xFFFFFFFF


@dataclass(frozen=True)
class ForestParams:
    """Random-forest training parameters."""

    n_estimators: int = 500
    max_depth: int = 10
    min_samples_split: int = 5
    min_samples_leaf: int = 2
    max_features: str = "sqrt"
    bootstrap: bool = True


DEFAULT_FOREST_PARAMS = ForestParams()


def train_forest(X, y, params: ForestParams = DEFAULT_FOREST_PARAMS,
                 seed: int = 0) -> RandomForestClassifier:
    """Fit a forest with the declared parameters on labeled windows."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if len(X) < 10:
        raise ValueError(f"need at least 10 samples, got {len(X)}")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels must contain both classes")
    clf = RandomForestClassifier(
        n_estimators=params.n_estimators,
        criterion="gini",
        max_depth=params.max_depth,
        min_samples_split=params.min_samples_split,
        min_samples_leaf=params.min_samples_leaf,
        max_features=params.max_features,
        bootstrap=params.bootstrap,
        random_state=seed & 0xFFFFFFFF,
    )
    return clf.fit(X, y)


def check_forest_structure(forest: RandomForestClassifier,
                           params: ForestParams = DEFAULT_FOREST_PARAMS) -> list:
    """Return a violation message per tree breaking the size constraints."""
    problems = []
    for t, est in enumerate(forest.estimators_):
        tree = est.tree_
        if tree.max_depth > params.max_depth:
            problems.append(f"tree {t}: depth {tree.max_depth} > {params.max_depth}")
        internal = tree.children_left != -1
        leaves = ~internal
        if np.any(tree.n_node_samples[internal] < params.min_samples_split):
            problems.append(f"tree {t}: internal node below min_samples_split")
        if np.any(tree.n_node_samples[leaves] < params.min_samples_leaf):
            problems.append(f"tree {t}: leaf below min_samples_leaf")
    total = float(np.sum(forest.feature_importances_))
    if abs(total - 1.0) > 1e-9:
        problems.append(f"importances sum to {total}, not 1")
    return problems


def inlier_rate(model: OneClassSVM, X) -> float:
    """Percentage of points the one-class model accepts."""
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        raise ValueError("test set must be non-empty")
    return 100.0 * float(np.mean(model.predict(X) == 1))


def _fit_transforms(X, n_components):
    scaler = ZScoreScaler().fit(X)
    pca = PrincipalComponents(n_components=n_components).fit(scaler.transform(X))
    return scaler, pca


def _apply(scaler, pca, X):
    return pca.transform(scaler.transform(X))


@dataclass(frozen=True)
class OcsvmMatrix:
    """Inlier-rate table for one train/test session pairing."""

    pairing: str
    train_key: tuple
    test_key: tuple
    agent_ids: tuple
    rates: np.ndarray  # (agents, agents), percentages; rows train agents
    train_outlier_fraction: np.ndarray  # (agents, agents)
    nu: float
    transform_mode: str


def ocsvm_matrix(session_features: dict, pairing: str, *, nu: float = 0.1,
                 gamma="median", transform_mode: str = "per-session",
                 n_components: int = 2, agent_ids=None) -> OcsvmMatrix:
    """Cross-agent inlier rates under one of the four session pairings.

    Cell (i, j) trains on agent i's training session and scores agent j's
    test session; see OCSVM_TRANSFORM_MODES for how the two sessions are
    normalized beforehand.
    """
    if pairing not in OCSVM_PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}; one of {sorted(OCSVM_PAIRINGS)}")
    if transform_mode not in OCSVM_TRANSFORM_MODES:
        raise ValueError(
            f"unknown transform_mode {transform_mode!r}; one of {OCSVM_TRANSFORM_MODES}"
        )
    train_key, test_key = OCSVM_PAIRINGS[pairing]
    if agent_ids is None:
        agent_ids = sorted({a for a, k, s in session_features})
    agent_ids = tuple(agent_ids)
    n = len(agent_ids)
    rates = np.zeros((n, n))
    fractions = np.zeros((n, n))

    for i, ai in enumerate(agent_ids):
        train_X = session_features[(ai, *train_key)]
        if transform_mode in ("train", "per-session"):
            scaler, pca = _fit_transforms(train_X, n_components)
            Ztr = _apply(scaler, pca, train_X)
            model = OneClassSVM(nu=nu, gamma=gamma).fit(Ztr)
            frac = float(np.mean(model.predict(Ztr) == -1))
        for j, aj in enumerate(agent_ids):
            test_X = session_features[(aj, *test_key)]
            if transform_mode == "train":
                Zte = _apply(scaler, pca, test_X)
            elif transform_mode == "per-session":
                te_scaler, te_pca = _fit_transforms(test_X, n_components)
                Zte = _apply(te_scaler, te_pca, test_X)
            else:
                pooled = np.vstack([train_X, test_X])
                p_scaler, p_pca = _fit_transforms(pooled, n_components)
                Ztr = _apply(p_scaler, p_pca, train_X)
                Zte = _apply(p_scaler, p_pca, test_X)
                model = OneClassSVM(nu=nu, gamma=gamma).fit(Ztr)
                frac = float(np.mean(model.predict(Ztr) == -1))
            rates[i, j] = inlier_rate(model, Zte)
            fractions[i, j] = frac
    return OcsvmMatrix(pairing, train_key, test_key, agent_ids,
                       rates, fractions, nu, transform_mode)


@dataclass(frozen=True)
class RfVerdict:
    """Cross-validated discrimination outcome for one session pair."""

    accuracy: float
    f1_class0: float
    f1_class1: float
    decision: str
    feature_importances: tuple
    fold_accuracies: tuple
    n_class0: int
    n_class1: int


def _blocked_folds(y, n_splits):
    # Contiguous time blocks per class, so overlapping neighbor windows
    # stay on one side of each split.
    chunks0 = np.array_split(np.flatnonzero(y == 0), n_splits)
    chunks1 = np.array_split(np.flatnonzero(y == 1), n_splits)
    all_idx = np.arange(len(y))
    for c0, c1 in zip(chunks0, chunks1):
        test = np.concatenate([c0, c1])
        train = np.setdiff1d(all_idx, test)
        yield train, test


def rf_compare(feat_a, feat_b, params: ForestParams = DEFAULT_FOREST_PARAMS,
               seed: int = 0, *, threshold: float = 0.7,
               cv: str = "blocked", n_splits: int = 5) -> RfVerdict:
    """Score how separable two window series are with a random forest.

    Windows of the first series are class 0, the second class 1. Accuracy
    is the mean over cross-validation folds; F1 per class comes from the
    pooled fold predictions; the verdict is different_user only when
    accuracy strictly exceeds the threshold. Importances come from a
    forest fitted on all windows.

    Sliding windows overlap heavily, so shuffled stratified folds leak
    near-duplicates between train and test and inflate same-user accuracy;
    blocked folds (contiguous time chunks per class) are the default, with
    "stratified" available for comparison.
    """
    A = np.asarray(feat_a, dtype=float)
    B = np.asarray(feat_b, dtype=float)
    if len(A) < 20 or len(B) < 20:
        raise ValueError("need at least 20 windows per series")
    X = np.vstack([A, B])
    y = np.concatenate([np.zeros(len(A), dtype=int), np.ones(len(B), dtype=int)])

    if cv == "stratified":
        splitter = StratifiedKFold(
            n_splits=n_splits, shuffle=True, random_state=_seed32(seed, "folds")
        )
        folds = splitter.split(X, y)
    elif cv == "blocked":
        folds = _blocked_folds(y, n_splits)
    else:
        raise ValueError(f"unknown cv {cv!r}; use 'stratified' or 'blocked'")

    pooled = np.empty(len(y), dtype=int)
    accuracies = []
    for k, (train_idx, test_idx) in enumerate(folds):
        clf = train_forest(X[train_idx], y[train_idx], params,
                           seed=derive_seed(seed, "fold", k))
        pred = clf.predict(X[test_idx])
        pooled[test_idx] = pred
        accuracies.append(float(np.mean(pred == y[test_idx])))

    accuracy = float(np.mean(accuracies))
    f1 = f1_score(y, pooled, average=None, labels=[0, 1], zero_division=0)
    full = train_forest(X, y, params, seed=derive_seed(seed, "importances"))
    return RfVerdict(
        accuracy=accuracy,
        f1_class0=float(f1[0]),
        f1_class1=float(f1[1]),
        decision=DIFFERENT_USER if accuracy > threshold else SAME_USER,
        feature_importances=tuple(float(v) for v in full.feature_importances_),
        fold_accuracies=tuple(accuracies),
        n_class0=len(A),
        n_class1=len(B),
    )


@dataclass(frozen=True)
class RfCell:
    train_agent: int
    train_session: int
    test_agent: int
    test_session: int
    verdict: RfVerdict
    same_agent: bool

    @property
    def misclassified(self) -> bool:
        wanted = SAME_USER if self.same_agent else DIFFERENT_USER
        return self.verdict.decision != wanted


@dataclass(frozen=True)
class RfMatrix:
    """All pairwise verdicts on one keyboard: agent-i session 1 against
    every other (agent, session), self-comparison excluded."""

    keyboard: str
    agent_ids: tuple
    threshold: float
    cells: tuple = field(repr=False)

    def cell(self, train_agent, test_agent, test_session) -> RfCell:
        for c in self.cells:
            if (c.train_agent, c.test_agent, c.test_session) == (
                    train_agent, test_agent, test_session):
                return c
        raise KeyError((train_agent, test_agent, test_session))

    def same_agent_cells(self):
        return [c for c in self.cells if c.same_agent]

    def cross_agent_cells(self):
        return [c for c in self.cells if not c.same_agent]


def rf_matrix(session_features: dict, keyboard: str, *,
              params: ForestParams = DEFAULT_FOREST_PARAMS, seed: int = 0,
              threshold: float = 0.7, cv: str = "blocked",
              agent_ids=None, sessions=(1, 2)) -> RfMatrix:
    if agent_ids is None:
        agent_ids = sorted({a for a, k, s in session_features if k == keyboard})
    agent_ids = tuple(agent_ids)
    cells = []
    for ai in agent_ids:
        train_X = session_features[(ai, keyboard, 1)]
        for aj in agent_ids:
            for t in sessions:
                if ai == aj and t == 1:
                    continue
                verdict = rf_compare(
                    train_X, session_features[(aj, keyboard, t)],
                    params, derive_seed(seed, "rf", keyboard, ai, aj, t),
                    threshold=threshold, cv=cv,
                )
                cells.append(RfCell(ai, 1, aj, t, verdict, ai == aj))
    return RfMatrix(keyboard, agent_ids, threshold, tuple(cells))


@dataclass(frozen=True)
class RfCrossKeyboard:
    """Same-agent verdicts across keyboards, all four session combos."""

    agent_ids: tuple
    keyboards: tuple
    threshold: float
    cells: dict  # (agent_id, session_a, session_b) -> RfVerdict

    def accuracy(self, agent_id, session_a=1, session_b=1) -> float:
        return self.cells[(agent_id, session_a, session_b)].accuracy


def rf_cross_keyboard(session_features: dict, *,
                      params: ForestParams = DEFAULT_FOREST_PARAMS,
                      seed: int = 0, threshold: float = 0.7,
                      cv: str = "blocked", agent_ids=None,
                      keyboards=("laptop", "mechanical")) -> RfCrossKeyboard:
    ka, kb = keyboards
    if agent_ids is None:
        agent_ids = sorted({a for a, k, s in session_features if k == ka})
    cells = {}
    for agent in agent_ids:
        for sa in (1, 2):
            for sb in (1, 2):
                cells[(agent, sa, sb)] = rf_compare(
                    session_features[(agent, ka, sa)],
                    session_features[(agent, kb, sb)],
                    params, derive_seed(seed, "rf-cross", agent, sa, sb),
                    threshold=threshold, cv=cv,
                )
    return RfCrossKeyboard(tuple(agent_ids), (ka, kb), threshold, cells)


def write_ocsvm_csv(path, matrix: OcsvmMatrix) -> None:
    labels = [f"user{a}" for a in matrix.agent_ids]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["train\\test"] + labels) + "\n")
        for i, ai in enumerate(matrix.agent_ids):
            cells = [f"{matrix.rates[i, j]:.2f}" for j in range(len(labels))]
            fh.write(",".join([f"user{ai}"] + cells) + "\n")


def write_ocsvm_json(path, matrix: OcsvmMatrix) -> None:
    doc = {
        "pairing": matrix.pairing,
        "train": list(matrix.train_key),
        "test": list(matrix.test_key),
        "nu": matrix.nu,
        "transform_mode": matrix.transform_mode,
        "inlier_rates": {
            f"user{ai}": {
                f"user{aj}": round(float(matrix.rates[i, j]), 2)
                for j, aj in enumerate(matrix.agent_ids)
            }
            for i, ai in enumerate(matrix.agent_ids)
        },
        "train_outlier_fraction": {
            f"user{ai}": round(float(matrix.train_outlier_fraction[i, i]), 4)
            for i, ai in enumerate(matrix.agent_ids)
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cell_row(cell: RfCell) -> list:
    v = cell.verdict
    return [
        f"user{cell.train_agent}_s{cell.train_session}",
        f"user{cell.test_agent}_s{cell.test_session}",
        f"{v.accuracy:.4f}",
        f"{v.f1_class0:.4f}",
        f"{v.f1_class1:.4f}",
        v.decision,
        "yes" if cell.same_agent else "no",
        "yes" if cell.misclassified else "no",
    ]


RF_CSV_HEADER = ["train", "test", "accuracy", "f1_class0", "f1_class1",
                 "decision", "same_agent", "misclassified"]


def write_rf_matrix_csv(path, matrix: RfMatrix) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(RF_CSV_HEADER) + "\n")
        for cell in matrix.cells:
            fh.write(",".join(_cell_row(cell)) + "\n")


def write_rf_matrix_json(path, matrix: RfMatrix) -> None:
    doc = {
        "keyboard": matrix.keyboard,
        "threshold": matrix.threshold,
        "cells": [
            {
                "train": f"user{c.train_agent}_s{c.train_session}",
                "test": f"user{c.test_agent}_s{c.test_session}",
                "accuracy": round(c.verdict.accuracy, 4),
                "f1_class0": round(c.verdict.f1_class0, 4),
                "f1_class1": round(c.verdict.f1_class1, 4),
                "decision": c.verdict.decision,
                "same_agent": c.same_agent,
                "misclassified": c.misclassified,
            }
            for c in matrix.cells
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_importances_csv(path, matrix: RfMatrix) -> None:
    """Plot-ready long-format importances, one row per cell and feature."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("train,test,feature,importance\n")
        for c in matrix.cells:
            for name, value in zip(FEATURE_NAMES, c.verdict.feature_importances):
                fh.write(
                    f"user{c.train_agent}_s{c.train_session},"
                    f"user{c.test_agent}_s{c.test_session},"
                    f"{name},{value:.6f}\n"
                )


def write_rf_cross_keyboard_csv(path, cross: RfCrossKeyboard) -> None:
    ka, kb = cross.keyboards
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("agent,train,test,accuracy,f1_class0,f1_class1,decision\n")
        for (agent, sa, sb), v in sorted(cross.cells.items()):
            fh.write(
                f"user{agent},{ka}_s{sa},{kb}_s{sb},"
                f"{v.accuracy:.4f},{v.f1_class0:.4f},{v.f1_class1:.4f},{v.decision}\n"
            )
