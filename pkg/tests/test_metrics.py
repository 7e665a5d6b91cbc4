import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavids import metrics
from uavids.errors import DataError


def cm(counts, names=None):
    counts = np.asarray(counts, dtype=np.int64)
    return metrics.ConfusionMatrix(counts, names or [str(i) for i in range(len(counts))])


def test_two_class_hand_example():
    rep = metrics.evaluate(cm([[1, 1], [0, 2]]), "macro")
    assert rep.accuracy == 0.75
    assert abs(rep.precision - (1.0 + 2 / 3) / 2) <= 1e-12
    assert abs(rep.precision - 0.8333333333) <= 1e-9
    assert rep.recall == 0.75
    assert abs(rep.averages["weighted"]["recall"] - 0.75) <= 1e-12
    f0, f1 = 2 * 0.5 / 1.5, 2 * (2 / 3) / (5 / 3)
    assert abs(rep.f1 - (f0 + f1) / 2) <= 1e-12


def test_perfect_prediction():
    rep = metrics.evaluate_labels([0, 1, 2, 2], [0, 1, 2, 2], ["a", "b", "c"])
    assert (rep.accuracy, rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0, 1.0)


def test_class_never_predicted_scores_zero():
    rep = metrics.evaluate(cm([[3, 0], [2, 0]]))
    assert rep.per_class[1] == {"class": "1", "precision": 0.0, "recall": 0.0, "f1": 0.0, "support": 2}
    assert rep.precision == 0.6 / 2


def test_confusion_counts():
    m = metrics.confusion([0, 0, 1, 2], [0, 1, 1, 0], 3)
    assert m.counts.tolist() == [[1, 1, 0], [0, 1, 0], [1, 0, 0]]
    with pytest.raises(DataError):
        metrics.confusion([0, 3], [0, 0], 3)


def test_empty_matrix_rejected():
    with pytest.raises(DataError):
        metrics.evaluate(cm([[0, 0], [0, 0]]))


def oracle(y_true, y_pred, K):
    """Scores counted straight from the label lists."""
    rows = []
    for k in range(K):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == k and p == k)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != k and p == k)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == k and p != k)
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        rows.append((p, r, f, tp + fn))
    n = len(y_true)
    macro = [sum(row[i] for row in rows) / K for i in range(3)]
    weighted = [sum(row[i] * row[3] for row in rows) / n for i in range(3)]
    acc = sum(1 for t, p in zip(y_true, y_pred) if t == p) / n
    return macro, weighted, acc


labels = st.integers(2, 5).flatmap(
    lambda K: st.tuples(
        st.just(K),
        st.lists(st.tuples(st.integers(0, K - 1), st.integers(0, K - 1)), min_size=1, max_size=60),
    )
)


@settings(max_examples=80, deadline=None)
@given(labels)
def test_matches_counting_oracle(case):
    K, pairs = case
    y_true = [t for t, _ in pairs]
    y_pred = [p for _, p in pairs]
    macro, weighted, acc = oracle(y_true, y_pred, K)
    rep = metrics.evaluate_labels(y_true, y_pred, [str(i) for i in range(K)])
    assert rep.accuracy == acc
    for got, want in zip((rep.precision, rep.recall, rep.f1), macro):
        assert abs(got - want) <= 1e-12
    w = rep.averages["weighted"]
    for key, want in zip(("precision", "recall", "f1"), weighted):
        assert abs(w[key] - want) <= 1e-12
    # weighted recall is accuracy
    assert abs(w["recall"] - acc) <= 1e-12
    for key in ("precision", "recall", "f1"):
        assert 0.0 <= rep.averages["macro"][key] <= 1.0


@settings(max_examples=50, deadline=None)
@given(labels, st.randoms(use_true_random=False))
def test_class_relabelling_invariance(case, rnd):
    K, pairs = case
    perm = list(range(K))
    rnd.shuffle(perm)
    names = [str(i) for i in range(K)]
    a = metrics.evaluate_labels([t for t, _ in pairs], [p for _, p in pairs], names)
    b = metrics.evaluate_labels([perm[t] for t, _ in pairs], [perm[p] for _, p in pairs], names)
    assert a.averages == b.averages
    assert a.accuracy == b.accuracy


def test_to_dict_has_both_averagings():
    d = metrics.evaluate(cm([[5, 1], [2, 4]]), "weighted").to_dict(model="DT")
    assert d["model"] == "DT" and d["averaging"] == "weighted"
    assert set(d["averages"]) == {"macro", "weighted"}
    assert d["confusion"] == [[5, 1], [2, 4]]
