"""Linear one-vs-rest SVM trained by mini-batch sub-gradient descent.

Each class ``c`` minimises ``C/2 ||w_c||^2 + mean_i max(0, 1 - y_ic (w_c.x_i + b_c))``
with step ``1/(C t)``. ``C`` is therefore the L2 strength: larger C means a
smaller weight norm. The bias is not regularised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..numkernel import seeded_rng


def objective(W, b, X, Y, C: float) -> float:
    margins = Y * (X @ W.T + b)
    hinge = np.maximum(0.0, 1.0 - margins).mean(axis=0)
    return float(0.5 * C * np.sum(W * W) + hinge.sum())


@dataclass
class SVMModel:
    W: np.ndarray  # (K, d)
    b: np.ndarray  # (K,)
    objective_history: list = field(default_factory=list, repr=False)
    kind: str = field(default="SVM", init=False)

    @property
    def n_classes(self) -> int:
        return self.W.shape[0]

    @property
    def n_features(self) -> int:
        return self.W.shape[1]

    def decision_function(self, X):
        return np.asarray(X, dtype=np.float64) @ self.W.T + self.b

    def predict(self, X):
        return np.argmax(self.decision_function(X), axis=1).astype(np.int64)

    def predict_proba(self, X):
        """Per-row min-max of decision values, normalised to sum to one."""
        S = self.decision_function(X)
        lo = S.min(axis=1, keepdims=True)
        span = S.max(axis=1, keepdims=True) - lo
        M = np.where(span > 0, (S - lo) / np.where(span > 0, span, 1.0), 1.0)
        return M / M.sum(axis=1, keepdims=True)


def train_svm(X, y, n_classes, params, seed) -> SVMModel:
    n, d = X.shape
    C = float(params["C"])
    Y = -np.ones((n, n_classes))
    Y[np.arange(n), y] = 1.0
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    rng = seeded_rng(seed, 5)
    t = 0
    best = objective(W, b, X, Y, C)
    history = [best]
    for _ in range(params["epochs"]):
        order = rng.permutation(n).astype(np.int64)
        W_new, b_new = W.copy(), b.copy()
        t = kernels.svm_epoch(X, Y, W_new, b_new, order, C, t, params["batch_size"])
        obj = objective(W_new, b_new, X, Y, C)
        # sub-gradient steps are not descent steps; an epoch that raises the
        # objective is discarded while the step size keeps decaying
        if obj <= best:
            W, b, best = W_new, b_new, obj
        history.append(best)
    return SVMModel(W, b, history)
