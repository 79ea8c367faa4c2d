"""Feature normalization and projection ahead of one-class scoring.

Both transformers follow the fit/transform estimator protocol: statistics
come from the data given to fit, and transform applies them unchanged to
anything else.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted


class ZScoreScaler(BaseEstimator, TransformerMixin):
    """Per-column z-scoring with population statistics.

    Constant columns scale to all zeros rather than dividing by zero.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale_ = np.where(sd == 0, 1.0, sd)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return (X - self.mean_) / self.scale_


class PrincipalComponents(BaseEstimator, TransformerMixin):
    """PCA by eigendecomposition of the population covariance matrix.

    Components are rows, ordered by decreasing variance; each is signed so
    its largest-magnitude entry is positive, pinning an otherwise
    arbitrary reflection.
    """

    def __init__(self, n_components: int = 2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n, d = X.shape
        if self.n_components < 1:
            raise ValueError("n_components must be at least 1")
        if n < self.n_components:
            raise ValueError(
                f"need at least {self.n_components} rows, got {n}"
            )
        if d < self.n_components:
            raise ValueError(
                f"n_components={self.n_components} exceeds {d} features"
            )
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        cov = centered.T @ centered / n
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1]
        eigvals = np.maximum(eigvals[order], 0.0)

        components = eigvecs[:, order[: self.n_components]].T
        for row in components:
            peak = np.argmax(np.abs(row))
            if row[peak] < 0:
                row *= -1

        self.components_ = components
        self.eigenvalues_ = eigvals
        self.explained_variance_ = eigvals[: self.n_components]
        total = eigvals.sum()
        self.explained_variance_ratio_ = (
            self.explained_variance_ / total if total > 0
            else np.zeros(self.n_components)
        )
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        Z = check_array(Z, dtype=np.float64)
        return Z @ self.components_ + self.mean_
