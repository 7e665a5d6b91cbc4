"""Both kernel backends against brute-force oracles and each other."""

import numpy as np
import pytest

from uavids import kernels


def split_oracle(X, y, idx, features, K):
    best = (-1, 0.0, -1.0)
    for f in features:
        vals = sorted(set(X[idx, f].tolist()))
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2.0
            if thr >= b:
                thr = a
            left = [y[i] for i in idx if X[i, f] <= thr]
            right = [y[i] for i in idx if X[i, f] > thr]
            sl = sum(left.count(c) ** 2 for c in range(K))
            sr = sum(right.count(c) ** 2 for c in range(K))
            score = sl / len(left) + sr / len(right)
            if score > best[2]:
                best = (int(f), thr, score)
    return best


@pytest.mark.parametrize("seed", range(8))
def test_best_split_matches_oracle(backend, seed):
    r = np.random.default_rng(seed)
    n, d, K = 40, 4, 3
    X = r.integers(0, 6, size=(n, d)).astype(float)  # many ties
    y = r.integers(0, K, size=n)
    idx = np.sort(r.choice(n, 30, replace=False)).astype(np.int64)
    feats = np.array([3, 0, 2], dtype=np.int64)
    f, thr, score = kernels.best_split(X, y, idx, feats, K)
    of, othr, oscore = split_oracle(X, y, idx, feats, K)
    assert (f, thr) == (of, othr)
    assert score == pytest.approx(oscore, rel=1e-14)


def test_best_split_constant_features(backend):
    X = np.ones((5, 2))
    y = np.array([0, 1, 0, 1, 0])
    f, _, _ = kernels.best_split(X, y, np.arange(5), np.arange(2), 2)
    assert f == -1


def test_backends_agree_bitwise():
    if "numba" not in kernels.BACKENDS:
        pytest.skip("numba unavailable")
    r = np.random.default_rng(1)
    X = np.round(r.normal(size=(300, 5)), 2)
    y = r.integers(0, 4, 300)
    idx = np.arange(300, dtype=np.int64)
    feats = np.arange(5, dtype=np.int64)
    a = kernels.BACKENDS["numba"]["best_split"](X, y, idx, feats, 4)
    b = kernels.BACKENDS["numpy"]["best_split"](X, y, idx, feats, 4)
    assert tuple(a) == tuple(b)
    Q = np.round(r.normal(size=(50, 5)), 1)
    Xt = np.round(r.normal(size=(200, 5)), 1)
    np.testing.assert_array_equal(
        kernels.BACKENDS["numba"]["knn_neighbors"](Xt, Q, 7),
        kernels.BACKENDS["numpy"]["knn_neighbors"](Xt, Q, 7),
    )


def test_tree_apply(backend):
    # root splits feature 1 at 0.5; its right child splits feature 0 at 2.0
    feature = np.array([1, -1, 0, -1, -1])
    threshold = np.array([0.5, 0, 2.0, 0, 0])
    left = np.array([1, -1, 3, -1, -1])
    right = np.array([2, -1, 4, -1, -1])
    X = np.array([[9.0, 0.5], [1.0, 0.7], [3.0, 0.7]])
    assert kernels.tree_apply(feature, threshold, left, right, X).tolist() == [1, 3, 4]


def knn_oracle(Xt, Q, k):
    out = []
    for q in Q:
        d = [(float(np.sum((q - x) ** 2)), i) for i, x in enumerate(Xt)]
        out.append([i for _, i in sorted(d)[:k]])
    return np.array(out)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_knn_neighbors_with_ties(backend, k):
    r = np.random.default_rng(k)
    Xt = r.integers(0, 3, size=(60, 2)).astype(float)  # heavy duplication
    Q = r.integers(0, 3, size=(25, 2)).astype(float)
    np.testing.assert_array_equal(kernels.knn_neighbors(Xt, Q, k), knn_oracle(Xt, Q, k))


def test_svm_epoch_backends_close():
    if "numba" not in kernels.BACKENDS:
        pytest.skip("numba unavailable")
    r = np.random.default_rng(2)
    X = r.normal(size=(100, 3))
    Y = np.where(r.random((100, 2)) < 0.5, 1.0, -1.0)
    order = r.permutation(100).astype(np.int64)
    out = []
    for name in ("numba", "numpy"):
        W, b = np.zeros((2, 3)), np.zeros(2)
        t = kernels.BACKENDS[name]["svm_epoch"](X, Y, W, b, order, 0.5, 0, 16)
        out.append((t, W, b))
    assert out[0][0] == out[1][0] == 7
    np.testing.assert_allclose(out[0][1], out[1][1], rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(out[0][2], out[1][2], rtol=1e-12, atol=1e-14)
