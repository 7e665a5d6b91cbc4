"""Softmax MLP classifier built on the autoencoder's layer and Adam code."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from ..nn import AdamState, adam_step, backward_stack, forward_stack, init_layer, restore, snapshot
from ..numkernel import seeded_rng

log = logging.getLogger(__name__)


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def cross_entropy(layers, X, y) -> float:
    P = softmax(forward_stack(layers, X)[-1])
    return float(-np.mean(np.log(np.maximum(P[np.arange(len(y)), y], 1e-300))))


def loss_and_grads(layers, X, y):
    """Mean cross-entropy and its gradients ``[(dW, db), ...]``."""
    acts = forward_stack(layers, X)
    P = softmax(acts[-1])
    rows = np.arange(len(y))
    loss = float(-np.mean(np.log(np.maximum(P[rows, y], 1e-300))))
    G = P.copy()
    G[rows, y] -= 1.0
    return loss, backward_stack(layers, acts, G / len(y))


def build_layers(rng, n_in: int, hidden, n_classes: int) -> list:
    dims = [n_in, *hidden, n_classes]
    return [
        init_layer(rng, dims[i], dims[i + 1], "tanh" if i < len(dims) - 2 else "linear")
        for i in range(len(dims) - 1)
    ]


@dataclass
class MLPModel:
    layers: list
    n_classes: int
    val_loss: list = field(default_factory=list, repr=False)
    kind: str = field(default="MLP", init=False)

    @property
    def n_features(self) -> int:
        return self.layers[0].n_in

    def predict_proba(self, X):
        return softmax(forward_stack(self.layers, np.asarray(X, dtype=np.float64))[-1])

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1).astype(np.int64)


def train_mlp(X, y, n_classes, params, seed) -> MLPModel:
    n = X.shape[0]
    rng = seeded_rng(seed, 4)
    layers = build_layers(rng, X.shape[1], params["hidden"], n_classes)

    perm = rng.permutation(n)
    n_val = min(max(1, int(round(params["val_fraction"] * n))), n - 1)
    val, fit = perm[:n_val], perm[n_val:]
    X_fit, y_fit, X_val, y_val = X[fit], y[fit], X[val], y[val]
    batch = min(params["batch_size"], X_fit.shape[0])

    state = AdamState.for_layers(layers, lr=params["learning_rate"])
    best, best_weights, stale, history = np.inf, snapshot(layers), 0, []
    for epoch in range(1, params["max_epochs"] + 1):
        order = rng.permutation(X_fit.shape[0])
        for start in range(0, X_fit.shape[0], batch):
            rows = order[start:start + batch]
            loss, grads = loss_and_grads(layers, X_fit[rows], y_fit[rows])
            if not np.isfinite(loss):
                raise TrainingError(f"MLP loss became non-finite at epoch {epoch}")
            adam_step(layers, grads, state)
        v = cross_entropy(layers, X_val, y_val)
        history.append(v)
        if v < best:
            best, best_weights, stale = v, snapshot(layers), 0
        else:
            stale += 1
            if stale >= params["patience"]:
                break
    log.debug("MLP stopped after %d epochs, best val loss %.4g", len(history), best)
    restore(layers, best_weights)
    return MLPModel(layers, n_classes, history)
