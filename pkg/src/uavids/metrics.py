"""Confusion matrices and precision / recall / F1 / accuracy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ShapeError

AVERAGINGS = ("macro", "weighted")
DEFAULT_AVERAGING = {"binary": "weighted", "multiclass": "macro"}


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K); row = true class, column = predicted class
    class_names: list

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    averaging: str
    per_class: list
    confusion: ConfusionMatrix
    averages: dict

    def to_dict(self, **extra) -> dict:
        return {
            **extra,
            "averaging": self.averaging,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "averages": self.averages,
            "per_class": self.per_class,
            "confusion": self.confusion.counts.tolist(),
        }


def confusion(y_true, y_pred, K: int, class_names=None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ShapeError("y_true and y_pred must be 1-D and of equal length")
    for name, v in (("y_true", y_true), ("y_pred", y_pred)):
        if v.size and (v.min() < 0 or v.max() >= K):
            raise DataError(f"{name} contains class ids outside [0, {K})")
    counts = np.bincount(y_true * K + y_pred, minlength=K * K).reshape(K, K)
    names = list(class_names) if class_names is not None else [str(i) for i in range(K)]
    return ConfusionMatrix(counts.astype(np.int64), names)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def per_class_scores(cm: ConfusionMatrix) -> list:
    c = cm.counts
    rows = []
    for k in range(c.shape[0]):
        tp = int(c[k, k])
        fp = int(c[:, k].sum()) - tp
        fn = int(c[k, :].sum()) - tp
        p = _ratio(tp, tp + fp)
        r = _ratio(tp, tp + fn)
        f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        rows.append({
            "class": cm.class_names[k],
            "precision": p,
            "recall": r,
            "f1": f,
            "support": tp + fn,
        })
    return rows


def _average(rows, key: str, averaging: str, total: int) -> float:
    # fsum is correctly rounded, so the result does not depend on class order
    if averaging == "macro":
        return math.fsum(r[key] for r in rows) / len(rows)
    return math.fsum(r["support"] * r[key] for r in rows) / total


def evaluate(cm: ConfusionMatrix, averaging: str = "macro") -> EvalReport:
    if averaging not in AVERAGINGS:
        raise ValueError(f"averaging must be one of {AVERAGINGS}")
    total = cm.total
    if total <= 0:
        raise DataError("cannot evaluate an empty confusion matrix")
    rows = per_class_scores(cm)
    accuracy = int(np.trace(cm.counts)) / total
    averages = {
        avg: {key: _average(rows, key, avg, total) for key in ("precision", "recall", "f1")}
        for avg in AVERAGINGS
    }
    chosen = averages[averaging]
    return EvalReport(
        precision=chosen["precision"],
        recall=chosen["recall"],
        f1=chosen["f1"],
        accuracy=accuracy,
        averaging=averaging,
        per_class=rows,
        confusion=cm,
        averages=averages,
    )


def evaluate_labels(y_true, y_pred, class_names, averaging: str = "macro") -> EvalReport:
    return evaluate(confusion(y_true, y_pred, len(class_names), class_names), averaging)
