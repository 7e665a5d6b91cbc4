"""Synthetic stand-in for the UAV cyber dataset.

Produces a CSV with the same outer shape as the real data: the three
non-essential columns, 54 feature columns (two of them categorical, a few
with missing cells) and a class label column. Classes are Gaussian blobs,
so separability is controlled by ``separation``.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dataset import CLASS_NAMES, DEFAULT_LABEL
from .numkernel import seeded_rng

# raw label spellings exercise label canonicalization
_RAW_LABELS = {
    "Benign": ("Benign", "benign"),
    "De-Authentication": ("DoS", "De-Authentication"),
    "Evil Twin": ("Evil Twin", "evil_twin"),
    "FDI": ("False Data Injection", "FDI"),
    "Replay": ("Replay", "replay"),
}
DEFAULT_WEIGHTS = (0.4, 0.15, 0.15, 0.15, 0.15)


def generate(
    n_records: int = 10_000,
    n_features: int = 54,
    seed: int = 7,
    separation: float = 3.0,
    weights=DEFAULT_WEIGHTS,
    null_rate: float = 0.01,
):
    """Return ``(header, rows)`` of string cells ('' = missing)."""
    rng = seeded_rng(seed, 100)
    K = len(CLASS_NAMES)
    y = rng.choice(K, size=n_records, p=np.asarray(weights) / np.sum(weights))
    centers = rng.uniform(0.0, separation, size=(K, n_features))
    scale = rng.uniform(0.5, 50.0, size=n_features)
    offset = rng.uniform(-100.0, 100.0, size=n_features)
    Z = centers[y] + rng.standard_normal((n_records, n_features))
    X = Z * scale + offset

    feature_names = [f"feat_{j:02d}" for j in range(n_features)]
    cat_cols = {0: "proto", 1: "subtype"}
    nullable = set(range(2, min(6, n_features)))
    header = ["frame.number", "wlan.bssid", "timestamp_c", *feature_names, DEFAULT_LABEL]
    rows = []
    for i in range(n_records):
        cells = [str(i + 1), f"02:00:00:00:00:{rng.integers(0, 4):02x}", f"{1700000000 + 0.01 * i:.2f}"]
        for j in range(n_features):
            if j in cat_cols:
                # categorical token correlated with the column value bucket
                cells.append(f"{cat_cols[j]}_{int(np.clip(Z[i, j], 0, separation + 2))}")
            elif j in nullable and rng.random() < null_rate:
                cells.append("")
            else:
                cells.append(repr(round(float(X[i, j]), 6)))
        spellings = _RAW_LABELS[CLASS_NAMES[y[i]]]
        cells.append(spellings[int(rng.integers(0, len(spellings)))])
        rows.append(cells)
    return header, rows


def write_csv(path, **kwargs) -> Path:
    header, rows = generate(**kwargs)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


