"""Time the numba and pure-numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--rows 10000] [--dim 8] [--repeat 3]

Each kernel is warmed up once (so JIT compilation is not timed), then the
best of ``--repeat`` runs is reported. Outputs of the two backends are
checked for equality before timing.
"""

import argparse
import time
import timeit

import numpy as np

from uavids import classifiers as clf
from uavids import kernels


def inputs(rows, dim, seed=0):
    r = np.random.default_rng(seed)
    y = r.integers(0, 5, rows)
    X = r.normal(size=(rows, dim)) + y[:, None]
    return X, y


def kernel_cases(X, y):
    n, d = X.shape
    idx = np.arange(n, dtype=np.int64)
    feats = np.arange(d, dtype=np.int64)
    tree = clf.train(clf.ClassifierSpec("DT", {"max_depth": 12}), X, y).tree
    Q = X[: min(n, 1000)]
    Y = -np.ones((n, 5))
    Y[np.arange(n), y] = 1.0
    order = np.arange(n, dtype=np.int64)

    def svm(impl):
        W, b = np.zeros((5, d)), np.zeros(5)
        impl(X, Y, W, b, order, 1e-3, 0, 64)
        return W

    # (kernel name, label, call taking the backend's implementation)
    return [
        ("best_split", "best_split (root node)", lambda impl: impl(X, y, idx, feats, 5)),
        ("tree_apply", "tree_apply", lambda impl: impl(tree.feature, tree.threshold, tree.left, tree.right, X)),
        ("knn_neighbors", f"knn_neighbors ({Q.shape[0]} queries, k=5)", lambda impl: impl(X, Q, 5)),
        ("svm_epoch", "svm_epoch (1 epoch)", svm),
    ]


def equal(a, b):
    if isinstance(a, tuple):
        return all(equal(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=0)


def bench_kernels(X, y, repeat):
    rows = []
    for key, label, call in kernel_cases(X, y):
        impls = {name: table[key] for name, table in kernels.BACKENDS.items()}
        outs = {name: call(impl) for name, impl in impls.items()}  # warm-up
        same = equal(outs["numba"], outs["numpy"]) if "numba" in outs else True
        times = {
            name: min(timeit.repeat(lambda impl=impl: call(impl), number=1, repeat=repeat))
            for name, impl in impls.items()
        }
        rows.append((label, times, same))
    return rows


def bench_training(X, y, kind, params):
    times = {}
    preds = {}
    saved = kernels._active
    try:
        for name, table in kernels.BACKENDS.items():
            kernels._active = table
            start = time.perf_counter()
            model = clf.train(clf.ClassifierSpec(kind, params), X, y)
            times[name] = time.perf_counter() - start
            preds[name] = clf.predict(model, X)
    finally:
        kernels._active = saved
    same = len({p.tobytes() for p in preds.values()}) == 1
    return times, same


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=10_000)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    X, y = inputs(args.rows, args.dim)
    print(f"rows={args.rows} dim={args.dim} default backend={kernels.BACKEND}")
    print(f"{'case':<40} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  same")
    for label, t, same in bench_kernels(X, y, args.repeat):
        nb = t.get("numba", float("nan"))
        print(f"{label:<40} {nb:>10.4f} {t['numpy']:>10.4f} {t['numpy'] / nb:>8.1f}  {same}")
    # JIT functions are compiled by now, so these are steady-state times
    for kind, params in (("DT", {}), ("RF", {"n_trees": 20}), ("SVM", {"epochs": 10})):
        t, same = bench_training(X, y, kind, params)
        nb = t.get("numba", float("nan"))
        print(f"{'train ' + kind + ' ' + str(params):<40} {nb:>10.4f} {t['numpy']:>10.4f} {t['numpy'] / nb:>8.1f}  {same}")


if __name__ == "__main__":
    main()
