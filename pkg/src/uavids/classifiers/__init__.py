"""The five supervised models trained on latent features.

``train(spec, X, y)`` dispatches on ``spec.kind``; every model exposes
``predict`` and ``predict_proba`` and round-trips through
:func:`save_classifier` / :func:`load_classifier`.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .. import serialization
from ..errors import ConfigError, DataError, ModelFileError, ShapeError
from ..nn import DenseLayer
from .knn import KNNModel, train_knn
from .mlp import MLPModel, train_mlp
from .svm import SVMModel, train_svm
from .tree import DecisionTreeModel, RandomForestModel, Tree, bootstrap_indices, train_decision_tree, train_random_forest

KINDS = ("DT", "RF", "KNN", "MLP", "SVM")

DEFAULT_PARAMS = {
    "DT": {"max_depth": None, "min_samples_split": 2},
    "RF": {"n_trees": 100, "max_features": "sqrt", "max_depth": None, "min_samples_split": 2},
    "KNN": {"k": 5},
    "MLP": {
        "hidden": [64, 32],
        "learning_rate": 1e-3,
        "batch_size": 64,
        "max_epochs": 200,
        "patience": 10,
        "val_fraction": 0.1,
    },
    "SVM": {"C": 1.0, "epochs": 100, "batch_size": 64},
}

_TRAINERS = {
    "DT": train_decision_tree,
    "RF": train_random_forest,
    "KNN": train_knn,
    "MLP": train_mlp,
    "SVM": train_svm,
}


@dataclass
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 1337

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ConfigError(f"{self.kind}: unknown hyperparameter(s) {sorted(unknown)}")
        merged = copy.deepcopy(DEFAULT_PARAMS[self.kind])
        merged.update(self.params)
        self.params = merged
        _validate(self.kind, merged)


def _positive_int(kind, p, name, allow_none=False):
    v = p[name]
    if v is None and allow_none:
        return
    if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
        raise ConfigError(f"{kind}: {name} must be a positive integer, got {v!r}")


def _validate(kind: str, p: dict) -> None:
    if kind in ("DT", "RF"):
        _positive_int(kind, p, "max_depth", allow_none=True)
        if not isinstance(p["min_samples_split"], int) or p["min_samples_split"] < 2:
            raise ConfigError(f"{kind}: min_samples_split must be >= 2")
    if kind == "RF":
        _positive_int(kind, p, "n_trees")
        mf = p["max_features"]
        if mf not in ("sqrt", "all", None) and not (isinstance(mf, int) and mf >= 1):
            raise ConfigError("RF: max_features must be 'sqrt', 'all' or a positive integer")
    elif kind == "KNN":
        _positive_int(kind, p, "k")
    elif kind == "MLP":
        for name in ("batch_size", "max_epochs", "patience"):
            _positive_int(kind, p, name)
        if not p["hidden"] or any(int(h) < 1 for h in p["hidden"]):
            raise ConfigError("MLP: hidden must list positive layer widths")
        if not p["learning_rate"] > 0:
            raise ConfigError("MLP: learning_rate must be positive")
        if not 0 < p["val_fraction"] < 1:
            raise ConfigError("MLP: val_fraction must lie in (0, 1)")
    elif kind == "SVM":
        if not float(p["C"]) > 0:
            raise ConfigError("SVM: C must be positive")
        _positive_int(kind, p, "epochs")
        _positive_int(kind, p, "batch_size")


def _check_features(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"features must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("features contain NaN or infinite values")
    return X


def train(spec: ClassifierSpec, X, y, n_classes: int | None = None):
    X = _check_features(X)
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (X.shape[0],) or X.shape[0] < 2:
        raise ShapeError("need at least 2 rows and exactly one label per row")
    if y.min() < 0:
        raise DataError("negative class id")
    if np.unique(y).size < 2:
        raise DataError("training data contains a single class")
    K = int(y.max()) + 1 if n_classes is None else int(n_classes)
    if y.max() >= K:
        raise DataError(f"label id {int(y.max())} outside n_classes={K}")
    return _TRAINERS[spec.kind](X, y, K, spec.params, spec.seed)


def _check_predict(model, X) -> np.ndarray:
    X = _check_features(X)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, got {X.shape[1]}")
    return X


def predict(model, X) -> np.ndarray:
    return model.predict(_check_predict(model, X))


def predict_proba(model, X) -> np.ndarray:
    return model.predict_proba(_check_predict(model, X))


# ------------------------------------------------------------ persistence


def _tree_arrays(prefix: str, tree: Tree) -> dict:
    return {
        f"{prefix}feature": tree.feature,
        f"{prefix}threshold": tree.threshold,
        f"{prefix}left": tree.left,
        f"{prefix}right": tree.right,
        f"{prefix}value": tree.value,
    }


def _tree_from(prefix: str, arrays: dict) -> Tree:
    return Tree(*(arrays[f"{prefix}{k}"] for k in ("feature", "threshold", "left", "right", "value")))


def save_classifier(model, path) -> None:
    kind = model.kind
    meta = {"n_classes": int(model.n_classes), "n_features": int(model.n_features)}
    if kind == "DT":
        arrays = _tree_arrays("", model.tree)
    elif kind == "RF":
        arrays = {}
        for i, tree in enumerate(model.trees):
            arrays.update(_tree_arrays(f"tree{i}.", tree))
        meta["n_trees"] = len(model.trees)
    elif kind == "KNN":
        arrays = {"X": model.X, "y": model.y}
        meta["k"] = model.k
    elif kind == "MLP":
        arrays = {}
        for i, layer in enumerate(model.layers):
            arrays[f"layer{i}.weights"] = layer.weights
            arrays[f"layer{i}.bias"] = layer.bias
        meta["activations"] = [layer.activation for layer in model.layers]
    elif kind == "SVM":
        arrays = {"W": model.W, "b": model.b}
    else:  # pragma: no cover
        raise ConfigError(f"cannot save model kind {kind!r}")
    serialization.write(path, kind, meta, arrays)


def load_classifier(path):
    kind, meta, arrays = serialization.read(path, KINDS)
    try:
        K, d = int(meta["n_classes"]), int(meta["n_features"])
        if kind == "DT":
            return DecisionTreeModel(_tree_from("", arrays), K, d)
        if kind == "RF":
            return RandomForestModel([_tree_from(f"tree{i}.", arrays) for i in range(int(meta["n_trees"]))], K, d)
        if kind == "KNN":
            return KNNModel(arrays["X"], arrays["y"], int(meta["k"]), K)
        if kind == "MLP":
            layers = [
                DenseLayer(arrays[f"layer{i}.weights"], arrays[f"layer{i}.bias"], act)
                for i, act in enumerate(meta["activations"])
            ]
            return MLPModel(layers, K)
        return SVMModel(arrays["W"], arrays["b"])
    except (KeyError, TypeError, ValueError, ShapeError) as exc:
        raise ModelFileError(f"bad {kind} model file: {exc}") from None


__all__ = [
    "KINDS",
    "DEFAULT_PARAMS",
    "ClassifierSpec",
    "train",
    "predict",
    "predict_proba",
    "save_classifier",
    "load_classifier",
    "bootstrap_indices",
    "DecisionTreeModel",
    "RandomForestModel",
    "KNNModel",
    "MLPModel",
    "SVMModel",
]
