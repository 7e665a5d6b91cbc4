"""CSV ingestion and preprocessing for the UAV cyber dataset.

Order of operations used by :func:`preprocess`:

1. drop non-essential columns,
2. integer-code categorical columns (first-appearance order),
3. canonicalize and encode class labels,
4. stratified train/test split,
5. median imputation fitted on the training rows,
6. min-max scaling fitted on the training rows, test values clamped to [0, 1].

Steps 4 and 5 are interchangeable as far as row assignment goes: the split
only looks at labels.
"""

from __future__ import annotations

import csv
import json
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AllNullColumnError,
    ConfigError,
    DataError,
    MissingFileError,
    MissingLabelColumnError,
    RaggedRowError,
    ShapeError,
    UnknownLabelError,
)
from .numkernel import seeded_rng

DEFAULT_DROP = ("frame.number", "wlan.bssid", "timestamp_c")
DEFAULT_LABEL = "Label"

BENIGN = "Benign"
CLASS_NAMES = ("Benign", "De-Authentication", "Evil Twin", "FDI", "Replay")
BINARY_NAMES = ("Benign", "Attack")

_ALIASES = {
    "benign": BENIGN,
    "normal": BENIGN,
    "de authentication": "De-Authentication",
    "deauthentication": "De-Authentication",
    "deauth": "De-Authentication",
    "dos": "De-Authentication",
    "evil twin": "Evil Twin",
    "eviltwin": "Evil Twin",
    "replay": "Replay",
    "fdi": "FDI",
    "false data injection": "FDI",
}


@dataclass
class RawTable:
    column_names: list
    rows: list  # list of lists of str | None
    label_column: str = DEFAULT_LABEL

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        j = self.column_names.index(name)
        return [r[j] for r in self.rows]


@dataclass
class FeatureTable:
    features: np.ndarray
    feature_names: list
    labels: np.ndarray
    class_names: list

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[1] != len(self.feature_names):
            raise ShapeError("feature matrix width does not match feature_names")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeError("one label per row required")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise DataError("label id outside class_names range")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    def take(self, idx) -> "FeatureTable":
        idx = np.asarray(idx, dtype=np.int64)
        return FeatureTable(self.features[idx], list(self.feature_names), self.labels[idx], list(self.class_names))


@dataclass
class ImputeParams:
    fill: np.ndarray
    null_counts: np.ndarray


@dataclass
class ScalerParams:
    min: np.ndarray
    max: np.ndarray


@dataclass
class DatasetSplit:
    train: FeatureTable
    test: FeatureTable
    seed: int
    ratio: float
    train_idx: np.ndarray = field(repr=False, default=None)
    test_idx: np.ndarray = field(repr=False, default=None)


# ---------------------------------------------------------------- loading


def load_csv(path, label_column: str = DEFAULT_LABEL) -> RawTable:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"dataset not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise MissingLabelColumnError(
                f"label column {label_column!r} not in header ({len(header)} columns)"
            )
        width = len(header)
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != width:
                raise RaggedRowError(reader.line_num, width, len(row))
            rows.append([c if c != "" else None for c in row])
    return RawTable(header, rows, label_column)


def drop_columns(t: RawTable, names) -> RawTable:
    names = list(names)
    missing = [n for n in names if n not in t.column_names]
    if missing:
        warnings.warn(f"columns not present, ignored: {missing}", stacklevel=2)
    if names and t.label_column in names:
        raise ConfigError("cannot drop the label column")
    keep = [j for j, n in enumerate(t.column_names) if n not in set(names)]
    return RawTable(
        [t.column_names[j] for j in keep],
        [[r[j] for j in keep] for r in t.rows],
        t.label_column,
    )


# ------------------------------------------------------ feature coding


def _parse_float(cell):
    try:
        v = float(cell)
    except ValueError:
        return None, False
    return (v if math.isfinite(v) else None), True


def code_features(t: RawTable):
    """Turn every non-label column into floats.

    Columns whose non-null cells all parse as numbers stay numeric; any other
    column is integer-coded by order of first appearance. Nulls become NaN.
    Returns ``(matrix, feature_names, categorical_maps)``.
    """
    names = [n for n in t.column_names if n != t.label_column]
    cols = [t.column_names.index(n) for n in names]
    X = np.full((t.n_rows, len(names)), np.nan)
    cat_maps = {}
    for out_j, (name, j) in enumerate(zip(names, cols)):
        values = [r[j] for r in t.rows]
        parsed = []
        numeric = True
        for cell in values:
            if cell is None:
                parsed.append(None)
                continue
            v, ok = _parse_float(cell)
            if not ok:
                numeric = False
                break
            parsed.append(v)
        if numeric:
            X[:, out_j] = [np.nan if v is None else v for v in parsed]
            continue
        mapping = {}
        for i, cell in enumerate(values):
            if cell is None:
                continue
            code = mapping.setdefault(cell, len(mapping))
            X[i, out_j] = code
        cat_maps[name] = mapping
    return X, names, cat_maps


def apply_categorical(t: RawTable, feature_names, cat_maps) -> np.ndarray:
    """Code a table with previously recorded categorical maps; unseen
    categories get the next unused integer, per column, in appearance order."""
    X = np.full((t.n_rows, len(feature_names)), np.nan)
    for out_j, name in enumerate(feature_names):
        if name not in t.column_names:
            raise DataError(f"column {name!r} missing")
        j = t.column_names.index(name)
        mapping = dict(cat_maps.get(name, {}))
        for i, r in enumerate(t.rows):
            cell = r[j]
            if cell is None:
                continue
            if name in cat_maps:
                X[i, out_j] = mapping.setdefault(cell, len(mapping))
            else:
                v, ok = _parse_float(cell)
                if not ok:
                    raise DataError(f"column {name!r}: non-numeric value {cell!r}")
                X[i, out_j] = np.nan if v is None else v
    return X


def impute_fit(X: np.ndarray, feature_names) -> ImputeParams:
    null = np.isnan(X)
    counts = null.sum(axis=0)
    fill = np.empty(X.shape[1])
    for j in range(X.shape[1]):
        col = X[~null[:, j], j]
        if col.size == 0:
            raise AllNullColumnError(feature_names[j])
        fill[j] = np.median(col)
    return ImputeParams(fill, counts.astype(np.int64))


def impute_apply(params: ImputeParams, X: np.ndarray) -> np.ndarray:
    out = np.array(X, dtype=np.float64, copy=True)
    null = np.isnan(out)
    out[null] = np.broadcast_to(params.fill, out.shape)[null]
    return out


def impute_fit_apply(t, feature_names=None):
    """Median-impute a coded matrix (or a RawTable, coded first) and return
    ``(filled matrix, ImputeParams)``."""
    if isinstance(t, RawTable):
        X, feature_names, _ = code_features(t)
    else:
        X = np.asarray(t, dtype=np.float64)
        feature_names = feature_names or [f"f{j}" for j in range(X.shape[1])]
    params = impute_fit(X, feature_names)
    return impute_apply(params, X), params


# ---------------------------------------------------------------- labels


def canonical_label(raw: str) -> str | None:
    key = re.sub(r"[_\-\s]+", " ", str(raw).strip().casefold()).strip()
    if key.endswith(" attack"):
        key = key[: -len(" attack")]
    key = re.sub(r"\s*\(.*\)$", "", key)  # "de authentication (dos)"
    return _ALIASES.get(key)


def encode_labels(labels, mode: str = "multiclass"):
    """Return ``(ids, class_names)``.

    Binary: Benign -> 0, any attack -> 1. Multiclass: classes present in
    ``labels`` get ids in alphabetical order of their canonical names.
    """
    if mode not in ("binary", "multiclass"):
        raise ConfigError(f"unknown task {mode!r}")
    canon = [canonical_label(v) for v in labels]
    bad = [str(v) for v, c in zip(labels, canon) if c is None]
    if bad:
        raise UnknownLabelError(bad)
    if mode == "binary":
        return np.array([0 if c == BENIGN else 1 for c in canon], dtype=np.int64), list(BINARY_NAMES)
    names = sorted(set(canon))
    lookup = {n: i for i, n in enumerate(names)}
    return np.array([lookup[c] for c in canon], dtype=np.int64), names


def to_binary(labels: np.ndarray, class_names) -> np.ndarray:
    """Map multiclass ids onto the binary Benign(0)/Attack(1) task."""
    class_names = list(class_names)
    if BENIGN not in class_names:
        return np.ones_like(np.asarray(labels, dtype=np.int64))
    return (np.asarray(labels) != class_names.index(BENIGN)).astype(np.int64)


def class_proportions(labels) -> dict:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise DataError("class_proportions of an empty label vector")
    ids, counts = np.unique(labels, return_counts=True)
    n = labels.size
    return {int(i): int(c) / n for i, c in zip(ids, counts)}


# ---------------------------------------------------------------- scaling


def fit_scaler(train: FeatureTable) -> ScalerParams:
    X = train.features
    return ScalerParams(X.min(axis=0), X.max(axis=0))


def scale_array(params: ScalerParams, X: np.ndarray) -> np.ndarray:
    span = params.max - params.min
    safe = np.where(span > 0, span, 1.0)
    out = (X - params.min) / safe
    out[:, span <= 0] = 0.0
    return np.clip(out, 0.0, 1.0)


def apply_scaler(params: ScalerParams, t: FeatureTable) -> FeatureTable:
    if t.features.shape[1] != params.min.shape[0]:
        raise ShapeError("scaler fitted on a different number of features")
    return FeatureTable(scale_array(params, t.features), list(t.feature_names), t.labels.copy(), list(t.class_names))


# ---------------------------------------------------------------- split


def split_indices(labels, ratio: float, seed: int):
    """Per-class seeded shuffle; the first round(ratio * count) rows of each
    class (clamped to [1, count - 1]) go to train. Returns sorted index arrays."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError("split ratio must lie in (0, 1)")
    labels = np.asarray(labels, dtype=np.int64)
    rng = seeded_rng(seed, 2)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < 2:
            raise DataError(f"class {int(c)} has {idx.size} record(s); stratified split needs >= 2")
        idx = idx[rng.permutation(idx.size)]
        k = int(math.floor(ratio * idx.size + 0.5))
        k = min(max(k, 1), idx.size - 1)
        train.append(idx[:k])
        test.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(t: FeatureTable, ratio: float = 0.8, seed: int = 1337) -> DatasetSplit:
    tr, te = split_indices(t.labels, ratio, seed)
    return DatasetSplit(t.take(tr), t.take(te), seed, ratio, tr, te)


# ---------------------------------------------------------------- pipeline


@dataclass
class Preprocessed:
    split: DatasetSplit
    impute: ImputeParams
    scaler: ScalerParams
    categorical: dict
    dropped: list
    label_column: str
    n_source_columns: int

    def sidecar(self) -> dict:
        return {
            "schema": 1,
            "label_column": self.label_column,
            "dropped_columns": list(self.dropped),
            "feature_names": list(self.split.train.feature_names),
            "class_names": list(self.split.train.class_names),
            "categorical_maps": self.categorical,
            "impute": {
                "fill": self.impute.fill.tolist(),
                "null_counts": self.impute.null_counts.tolist(),
            },
            "scaler": {"min": self.scaler.min.tolist(), "max": self.scaler.max.tolist()},
            "split": {
                "seed": int(self.split.seed),
                "ratio": float(self.split.ratio),
                "n_train": self.split.train.n_rows,
                "n_test": self.split.test.n_rows,
            },
        }


def preprocess(raw: RawTable, drop=DEFAULT_DROP, ratio: float = 0.8, seed: int = 1337) -> Preprocessed:
    n_source = len(raw.column_names)
    present = [c for c in drop if c in raw.column_names]
    t = drop_columns(raw, drop)
    X, names, cat_maps = code_features(t)
    labels, class_names = encode_labels(t.column(t.label_column), "multiclass")
    tr, te = split_indices(labels, ratio, seed)
    impute = impute_fit(X[tr], names)
    X = impute_apply(impute, X)
    full = FeatureTable(X, names, labels, class_names)
    split = DatasetSplit(full.take(tr), full.take(te), seed, ratio, tr, te)
    scaler = fit_scaler(split.train)
    split.train = apply_scaler(scaler, split.train)
    split.test = apply_scaler(scaler, split.test)
    return Preprocessed(split, impute, scaler, cat_maps, present, raw.label_column, n_source)


# ---------------------------------------------------------------- I/O


def _fmt(v: float) -> str:
    return repr(float(v))


def write_feature_csv(path, t: FeatureTable, label_column: str = DEFAULT_LABEL) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*t.feature_names, label_column])
        names = t.class_names
        for row, lab in zip(t.features.tolist(), t.labels.tolist()):
            w.writerow([*map(_fmt, row), names[lab]])


def read_feature_csv(path, class_names, label_column: str = DEFAULT_LABEL) -> FeatureTable:
    raw = load_csv(path, label_column)
    names = [n for n in raw.column_names if n != label_column]
    j_label = raw.column_names.index(label_column)
    cols = [raw.column_names.index(n) for n in names]
    lookup = {n: i for i, n in enumerate(class_names)}
    X = np.empty((raw.n_rows, len(names)))
    y = np.empty(raw.n_rows, dtype=np.int64)
    for i, r in enumerate(raw.rows):
        try:
            X[i] = [float(r[j]) for j in cols]
        except (TypeError, ValueError):
            raise DataError(f"{path}: row {i + 2} has missing or non-numeric features") from None
        if r[j_label] not in lookup:
            raise UnknownLabelError([r[j_label]])
        y[i] = lookup[r[j_label]]
    return FeatureTable(X, names, y, list(class_names))


def write_sidecar(path, pre: Preprocessed) -> None:
    Path(path).write_text(json.dumps(pre.sidecar(), indent=2, sort_keys=True) + "\n")


def replay(raw: RawTable, sidecar: dict) -> FeatureTable:
    """Apply recorded preprocessing parameters to a new raw table."""
    t = drop_columns(raw, [c for c in sidecar["dropped_columns"] if c in raw.column_names])
    X = apply_categorical(t, sidecar["feature_names"], sidecar["categorical_maps"])
    X = impute_apply(ImputeParams(np.array(sidecar["impute"]["fill"]), np.array(sidecar["impute"]["null_counts"])), X)
    scaler = ScalerParams(np.array(sidecar["scaler"]["min"]), np.array(sidecar["scaler"]["max"]))
    canon = [canonical_label(v) for v in t.column(t.label_column)]
    names = list(sidecar["class_names"])
    bad = [c for c in canon if c not in names]
    if bad:
        raise UnknownLabelError([str(b) for b in bad])
    y = np.array([names.index(c) for c in canon], dtype=np.int64)
    return FeatureTable(scale_array(scaler, X), list(sidecar["feature_names"]), y, names)


def read_sidecar(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise MissingFileError(f"sidecar not found: {path}") from None
