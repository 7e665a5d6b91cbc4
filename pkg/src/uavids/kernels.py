"""Hot inner loops, each with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``UAVIDS_DISABLE_NUMBA`` is not
set to a truthy value. Both paths of ``best_split``, ``tree_apply`` and
``knn_neighbors`` perform the same float operations in the same order, so they
return identical results. ``svm_epoch`` differs only in summation order of the
dot products.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_flag = os.environ.get("UAVIDS_DISABLE_NUMBA", "").strip().lower()
NUMBA_ENABLED = numba is not None and _flag not in {"1", "true", "yes", "on"}


def _jit(func):
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True, nogil=True)(func)


# --------------------------------------------------------------------------
# CART split search
#
# Score to maximise is sum_c nL_c^2 / nL + sum_c nR_c^2 / nR, which is the
# weighted Gini decrease up to constants. Ties keep the earliest feature in
# ``features`` and the lowest threshold.


def _best_split_loop(X, y, idx, features, n_classes):
    n = idx.shape[0]
    best_feature = -1
    best_threshold = 0.0
    best_score = -1.0
    total = np.zeros(n_classes, dtype=np.int64)
    for i in range(n):
        total[y[idx[i]]] += 1
    total_sq = 0
    for c in range(n_classes):
        total_sq += total[c] * total[c]
    vals = np.empty(n, dtype=np.float64)
    left = np.zeros(n_classes, dtype=np.int64)
    right = np.zeros(n_classes, dtype=np.int64)
    for fi in range(features.shape[0]):
        f = features[fi]
        for i in range(n):
            vals[i] = X[idx[i], f]
        order = np.argsort(vals)
        for c in range(n_classes):
            left[c] = 0
            right[c] = total[c]
        sq_left = 0
        sq_right = total_sq
        for i in range(n - 1):
            c = y[idx[order[i]]]
            sq_left += 2 * left[c] + 1
            sq_right -= 2 * right[c] - 1
            left[c] += 1
            right[c] -= 1
            v = vals[order[i]]
            v_next = vals[order[i + 1]]
            if v_next > v:
                n_left = i + 1
                n_right = n - n_left
                score = sq_left / n_left + sq_right / n_right
                if score > best_score:
                    best_score = score
                    best_feature = f
                    thr = (v + v_next) / 2.0
                    if thr >= v_next:
                        thr = v
                    best_threshold = thr
    return best_feature, best_threshold, best_score


def _best_split_np(X, y, idx, features, n_classes):
    n = idx.shape[0]
    best_feature, best_threshold, best_score = -1, 0.0, -1.0
    if n < 2:
        return best_feature, best_threshold, best_score
    yi = y[idx]
    total = np.bincount(yi, minlength=n_classes).astype(np.int64)
    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    rows = np.arange(n)
    for f in features:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        valid = sv[1:] > sv[:-1]
        if not valid.any():
            continue
        onehot = np.zeros((n, n_classes), dtype=np.int64)
        onehot[rows, yi[order]] = 1
        left = np.cumsum(onehot, axis=0)[:-1]
        right = total - left
        score = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / n_right
        score = np.where(valid, score, -np.inf)
        i = int(np.argmax(score))
        if score[i] > best_score:
            best_score = float(score[i])
            best_feature = int(f)
            thr = (sv[i] + sv[i + 1]) / 2.0
            if thr >= sv[i + 1]:
                thr = sv[i]
            best_threshold = float(thr)
    return best_feature, best_threshold, best_score


# --------------------------------------------------------------------------
# Tree traversal. Leaves carry feature == -1; rows go left when x <= threshold.


def _tree_apply_loop(feature, threshold, left, right, X):
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def _tree_apply_np(feature, threshold, left, right, X):
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.flatnonzero(feature[node] >= 0)
    while active.size:
        cur = node[active]
        go_left = X[active, feature[cur]] <= threshold[cur]
        node[active] = np.where(go_left, left[cur], right[cur])
        active = active[feature[node[active]] >= 0]
    return node


# --------------------------------------------------------------------------
# k nearest neighbours by squared Euclidean distance; ties broken by the
# lower training index. Distances accumulate feature by feature in both paths.


def _knn_loop(X_train, X_query, k):
    n_train, d = X_train.shape
    n_query = X_query.shape[0]
    out_idx = np.empty((n_query, k), dtype=np.int64)
    best_d = np.empty(k, dtype=np.float64)
    best_i = np.empty(k, dtype=np.int64)
    for q in range(n_query):
        filled = 0
        for i in range(n_train):
            acc = 0.0
            for j in range(d):
                t = X_query[q, j] - X_train[i, j]
                acc += t * t
            if filled < k:
                pos = filled
                filled += 1
            elif acc < best_d[k - 1]:
                pos = k - 1
            else:
                continue
            # insertion keeps (distance, index) order; equal distances stay behind
            while pos > 0 and best_d[pos - 1] > acc:
                best_d[pos] = best_d[pos - 1]
                best_i[pos] = best_i[pos - 1]
                pos -= 1
            best_d[pos] = acc
            best_i[pos] = i
        for j in range(k):
            out_idx[q, j] = best_i[j]
    return out_idx


def _knn_np(X_train, X_query, k, chunk=256):
    n_train, d = X_train.shape
    n_query = X_query.shape[0]
    out = np.empty((n_query, k), dtype=np.int64)
    train_idx = np.arange(n_train)
    for start in range(0, n_query, chunk):
        Q = X_query[start:start + chunk]
        acc = np.zeros((Q.shape[0], n_train))
        for j in range(d):
            t = Q[:, j, None] - X_train[None, :, j]
            acc += t * t
        kth = np.partition(acc, k - 1, axis=1)[:, k - 1]
        for r in range(Q.shape[0]):
            cand = np.flatnonzero(acc[r] <= kth[r])
            order = np.lexsort((train_idx[cand], acc[r, cand]))
            out[start + r] = cand[order[:k]]
    return out


# --------------------------------------------------------------------------
# One epoch of mini-batch Pegasos over all one-vs-rest problems at once.
# Y holds +1/-1 targets (n, K); W is (K, d). Updates W, b in place and
# returns the new step counter.


def _svm_epoch_loop(X, Y, W, b, order, lam, t, batch):
    n, d = X.shape
    K = W.shape[0]
    gw = np.zeros((K, d))
    gb = np.zeros(K)
    for start in range(0, n, batch):
        stop = min(start + batch, n)
        m = stop - start
        t += 1
        eta = 1.0 / (lam * t)
        gw[:, :] = 0.0
        gb[:] = 0.0
        for r in range(start, stop):
            i = order[r]
            for c in range(K):
                s = b[c]
                for j in range(d):
                    s += W[c, j] * X[i, j]
                if Y[i, c] * s < 1.0:
                    for j in range(d):
                        gw[c, j] += Y[i, c] * X[i, j]
                    gb[c] += Y[i, c]
        for c in range(K):
            for j in range(d):
                W[c, j] -= eta * (lam * W[c, j] - gw[c, j] / m)
            b[c] += eta * gb[c] / m
    return t


def _svm_epoch_np(X, Y, W, b, order, lam, t, batch):
    n = X.shape[0]
    for start in range(0, n, batch):
        rows = order[start:start + batch]
        m = rows.shape[0]
        t += 1
        eta = 1.0 / (lam * t)
        Xb, Yb = X[rows], Y[rows]
        active = (Yb * (Xb @ W.T + b)) < 1.0
        Ya = np.where(active, Yb, 0.0)
        W -= eta * (lam * W - (Ya.T @ Xb) / m)
        b += eta * Ya.sum(axis=0) / m
    return t


_best_split_nb = _jit(_best_split_loop)
_tree_apply_nb = _jit(_tree_apply_loop)
_knn_nb = _jit(_knn_loop)
_svm_epoch_nb = _jit(_svm_epoch_loop)

BACKENDS = {
    "numpy": {
        "best_split": _best_split_np,
        "tree_apply": _tree_apply_np,
        "knn_neighbors": _knn_np,
        "svm_epoch": _svm_epoch_np,
    },
}
if numba is not None:
    BACKENDS["numba"] = {
        "best_split": _best_split_nb,
        "tree_apply": _tree_apply_nb,
        "knn_neighbors": _knn_nb,
        "svm_epoch": _svm_epoch_nb,
    }

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
_active = BACKENDS[BACKEND]


def best_split(X, y, idx, features, n_classes):
    """Best (feature, threshold, score) over ``features`` for rows ``idx``.

    Returns feature -1 when every candidate feature is constant on ``idx``.
    """
    f, thr, score = _active["best_split"](X, y, idx, features, n_classes)
    return int(f), float(thr), float(score)


def tree_apply(feature, threshold, left, right, X):
    return _active["tree_apply"](feature, threshold, left, right, X)


def knn_neighbors(X_train, X_query, k):
    return _active["knn_neighbors"](X_train, X_query, k)


def svm_epoch(X, Y, W, b, order, lam, t, batch):
    return int(_active["svm_epoch"](X, Y, W, b, order, lam, t, batch))
