"""CART decision trees (Gini) and bagged random forests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..numkernel import seeded_rng


@dataclass
class Tree:
    """Flat node arrays in preorder. Leaves have ``feature == -1``;
    ``value`` holds each node's training class histogram."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        return kernels.tree_apply(self.feature, self.threshold, self.left, self.right, X)

    def leaf_counts(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    *,
    max_features: int | None = None,
    min_samples_split: int = 2,
    max_depth: int | None = None,
    rng: np.random.Generator | None = None,
) -> Tree:
    n, d = X.shape
    all_features = np.arange(d, dtype=np.int64)
    subsample = max_features is not None and max_features < d
    if subsample and rng is None:
        raise ValueError("feature subsampling needs an rng")

    feature, threshold, left, right, value = [], [], [], [], []
    # (rows, depth, parent, is_left); right child pushed first so the left
    # subtree is numbered first
    stack = [(np.arange(n, dtype=np.int64), 0, -1, False)]
    while stack:
        idx, depth, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        counts = np.bincount(y[idx], minlength=n_classes)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts)
        if (
            np.count_nonzero(counts) <= 1
            or idx.size < min_samples_split
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        if subsample:
            cand = np.sort(rng.choice(d, max_features, replace=False)).astype(np.int64)
            f, thr, _ = kernels.best_split(X, y, idx, cand, n_classes)
            if f < 0:
                f, thr, _ = kernels.best_split(X, y, idx, all_features, n_classes)
        else:
            f, thr, _ = kernels.best_split(X, y, idx, all_features, n_classes)
        if f < 0:
            continue
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        stack.append((idx[~go_left], depth + 1, node, False))
        stack.append((idx[go_left], depth + 1, node, True))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.int64).reshape(len(value), n_classes),
    )


@dataclass
class DecisionTreeModel:
    tree: Tree
    n_classes: int
    n_features: int
    kind: str = field(default="DT", init=False)

    def predict_proba(self, X):
        counts = self.tree.leaf_counts(X).astype(np.float64)
        return counts / counts.sum(axis=1, keepdims=True)

    def predict(self, X):
        return np.argmax(self.tree.leaf_counts(X), axis=1).astype(np.int64)


def bootstrap_indices(seed: int, tree_index: int, n: int) -> np.ndarray:
    """Bootstrap rows for forest member ``tree_index``; the same generator
    then drives that tree's feature subsampling."""
    return _tree_rng(seed, tree_index).integers(0, n, n)


def _tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    return seeded_rng(seed, 3, tree_index)


def resolve_max_features(max_features, d: int) -> int:
    if max_features in (None, "all"):
        return d
    if max_features == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    return max(1, min(int(max_features), d))


@dataclass
class RandomForestModel:
    trees: list
    n_classes: int
    n_features: int
    kind: str = field(default="RF", init=False)

    def votes(self, X) -> np.ndarray:
        votes = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            votes[rows, np.argmax(tree.leaf_counts(X), axis=1)] += 1
        return votes

    def predict_proba(self, X):
        return self.votes(X) / len(self.trees)

    def predict(self, X):
        return np.argmax(self.votes(X), axis=1).astype(np.int64)


def train_decision_tree(X, y, n_classes, params, seed) -> DecisionTreeModel:
    tree = grow_tree(
        X, y, n_classes,
        min_samples_split=params["min_samples_split"],
        max_depth=params["max_depth"],
    )
    return DecisionTreeModel(tree, n_classes, X.shape[1])


def train_random_forest(X, y, n_classes, params, seed) -> RandomForestModel:
    n, d = X.shape
    m = resolve_max_features(params["max_features"], d)
    trees = []
    for t in range(params["n_trees"]):
        rng = _tree_rng(seed, t)
        rows = rng.integers(0, n, n)
        trees.append(
            grow_tree(
                X[rows], y[rows], n_classes,
                max_features=m,
                min_samples_split=params["min_samples_split"],
                max_depth=params["max_depth"],
                rng=rng,
            )
        )
    return RandomForestModel(trees, n_classes, d)
