"""Dense float64 primitives and the seeded generator shared by every model.

Matrices and vectors are plain ``numpy.ndarray`` objects (row-major, float64).
The generator is numpy's Philox counter-based bit generator, which produces
the same stream on every platform for a given seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

DTYPE = np.float64


def seeded_rng(seed: int, *stream: int) -> np.random.Generator:
    """Return a Philox generator keyed by ``seed`` and optional sub-stream ids.

    Sub-streams let independent consumers (per tree, per stage) draw from
    non-overlapping sequences without sharing a generator.
    """
    if stream:
        ss = np.random.SeedSequence([int(seed), *map(int, stream)])
    else:
        ss = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(ss))


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=DTYPE)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("matmul produced non-finite entries")
    return out


def tanh_map(v) -> np.ndarray:
    # libm tanh saturates cleanly for large |x| and is exactly odd
    return np.tanh(np.asarray(v, dtype=DTYPE))


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int, stddev: float) -> np.ndarray:
    if stddev <= 0:
        raise ValueError("stddev must be positive")
    if rows < 0 or cols < 0:
        raise ShapeError("negative dimension")
    return rng.standard_normal((rows, cols)) * stddev
