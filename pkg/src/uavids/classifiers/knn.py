from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import ConfigError


@dataclass
class KNNModel:
    """Stores the training set; Euclidean distance, majority vote.

    Distance ties go to the lower training index, vote ties to the lower
    class id.
    """

    X: np.ndarray
    y: np.ndarray
    k: int
    n_classes: int
    kind: str = field(default="KNN", init=False)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def neighbors(self, X) -> np.ndarray:
        return kernels.knn_neighbors(self.X, np.ascontiguousarray(X, dtype=np.float64), self.k)

    def votes(self, X) -> np.ndarray:
        labels = self.y[self.neighbors(X)]
        votes = np.zeros((labels.shape[0], self.n_classes), dtype=np.int64)
        for j in range(self.k):
            votes[np.arange(labels.shape[0]), labels[:, j]] += 1
        return votes

    def predict_proba(self, X):
        return self.votes(X) / self.k

    def predict(self, X):
        return np.argmax(self.votes(X), axis=1).astype(np.int64)


def train_knn(X, y, n_classes, params, seed) -> KNNModel:
    k = params["k"]
    if k > X.shape[0]:
        raise ConfigError(f"k={k} exceeds the {X.shape[0]} training rows")
    return KNNModel(np.ascontiguousarray(X), np.asarray(y, dtype=np.int64), k, n_classes)
