"""One-class support vector machine trained by pairwise coordinate descent.

Solves the standard nu-parameterized one-class dual

    minimize   (1/2) a' K a
    subject to 0 <= a_i <= 1/(nu * n),  sum(a) = 1

with an RBF kernel. Each step moves mass between the most violating pair
of coordinates (largest gradient onto smallest), which preserves the
simplex constraint exactly; convergence is declared when the KKT gap
drops below tol. Points score f(x) = sum_i a_i k(x_i, x) - rho, with
f >= 0 read as inlier.
"""

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted


class ConvergenceError(RuntimeError):
    """Solver hit its iteration cap; carries the remaining KKT gap."""

    def __init__(self, residual: float, max_iter: int):
        super().__init__(
            f"no convergence after {max_iter} iterations; KKT gap {residual:.3e}"
        )
        self.residual = residual


def median_heuristic_gamma(X: np.ndarray) -> float:
    """1 / median pairwise squared distance; 1.0 for degenerate data."""
    X = np.asarray(X, dtype=float)
    diff = X[:, None, :] - X[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    upper = sq[np.triu_indices(len(X), k=1)]
    if len(upper) == 0:
        return 1.0
    med = float(np.median(upper))
    return 1.0 / med if med > 0 else 1.0


def _rbf(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


class OneClassSVM(BaseEstimator, OutlierMixin):
    """RBF one-class SVM with nu bounding the training outlier share.

    gamma may be a positive float or "median" to set the kernel width
    from the training data's median pairwise squared distance.
    """

    def __init__(self, nu: float = 0.1, gamma="median",
                 tol: float = 1e-6, max_iter: int = 100_000):
        self.nu = nu
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n = X.shape[0]
        if n < 10:
            raise ValueError(f"need at least 10 training points, got {n}")
        if not 0 < self.nu <= 1:
            raise ValueError("nu must be in (0, 1]")
        if self.nu * n < 1:
            raise ValueError("nu * n_samples must be at least 1")

        if self.gamma == "median":
            gamma = median_heuristic_gamma(X)
        else:
            gamma = float(self.gamma)
            if gamma <= 0:
                raise ValueError("gamma must be positive")

        K = _rbf(X, X, gamma)
        c = 1.0 / (self.nu * n)

        # Start feasible the way libsvm does: the first floor(nu*n) points
        # carry a full box each, the next takes the remainder.
        alpha = np.zeros(n)
        n_full = int(self.nu * n)
        alpha[:n_full] = c
        if n_full < n:
            alpha[n_full] = 1.0 - n_full * c
        grad = K @ alpha

        bnd = 1e-10 * c
        violation = np.inf
        it = 0
        for it in range(1, self.max_iter + 1):
            can_up = alpha < c - bnd
            can_down = alpha > bnd
            i = int(np.argmin(np.where(can_up, grad, np.inf)))
            j = int(np.argmax(np.where(can_down, grad, -np.inf)))
            violation = grad[j] - grad[i]
            if violation <= self.tol:
                break
            eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
            room = min(c - alpha[i], alpha[j])
            if eta > 1e-12:
                delta = min(violation / eta, room)
            else:
                delta = room
            alpha[i] = min(c, alpha[i] + delta)
            alpha[j] = max(0.0, alpha[j] - delta)
            grad += delta * (K[:, i] - K[:, j])
        else:
            raise ConvergenceError(float(violation), self.max_iter)

        free = (alpha > bnd) & (alpha < c - bnd)
        at_upper = alpha >= c - bnd
        at_lower = alpha <= bnd
        if free.any():
            rho = float(grad[free].mean())
        else:
            lo = float(grad[at_upper].max()) if at_upper.any() else -np.inf
            hi = float(grad[at_lower].min()) if at_lower.any() else np.inf
            if np.isinf(lo):
                rho = hi
            elif np.isinf(hi):
                rho = lo
            else:
                rho = (lo + hi) / 2.0

        sv = alpha > bnd
        self.gamma_ = gamma
        self.alpha_ = alpha
        self.support_ = np.flatnonzero(sv)
        self.support_vectors_ = X[sv].copy()
        self.dual_coef_ = alpha[sv].copy()
        self.rho_ = rho
        self.n_iter_ = it
        self.kkt_violation_ = float(max(violation, 0.0))
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "support_vectors_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        K = _rbf(X, self.support_vectors_, self.gamma_)
        return K @ self.dual_coef_ - self.rho_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)
