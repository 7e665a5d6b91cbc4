"""Versioned JSON container for trained models.

Layout::

    {
      "format": "uavids-model",
      "version": 1,
      "kind": "autoencoder" | "DT" | "RF" | "KNN" | "MLP" | "SVM",
      "meta": {...},                         # kind-specific scalars
      "arrays": {name: {"dtype": "<f8" | "<i8", "shape": [...], "data": base64}},
      "checksum": sha256 hex over the raw array bytes in sorted-name order
    }

Array payloads are little-endian so files move between platforms unchanged.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import MissingFileError, ModelFileError

FORMAT = "uavids-model"
VERSION = 1
_DTYPES = {"<f8": np.dtype("<f8"), "<i8": np.dtype("<i8")}


def _encode(arr: np.ndarray) -> tuple[dict, bytes]:
    arr = np.asarray(arr)
    key = "<f8" if arr.dtype.kind == "f" else "<i8"
    raw = np.ascontiguousarray(arr, dtype=_DTYPES[key]).tobytes()
    return {"dtype": key, "shape": list(arr.shape), "data": base64.b64encode(raw).decode("ascii")}, raw


def dumps(kind: str, meta: dict, arrays: dict[str, np.ndarray]) -> str:
    digest = hashlib.sha256()
    encoded = {}
    for name in sorted(arrays):
        entry, raw = _encode(arrays[name])
        encoded[name] = entry
        digest.update(name.encode())
        digest.update(raw)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "meta": meta,
        "arrays": encoded,
        "checksum": digest.hexdigest(),
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def loads(text: str, expect_kind: str | tuple | None = None) -> tuple[str, dict, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"corrupt model file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFileError("not a uavids model container")
    if doc.get("version") != VERSION:
        raise ModelFileError(f"unsupported container version {doc.get('version')!r}")
    kind = doc.get("kind")
    if expect_kind is not None:
        allowed = (expect_kind,) if isinstance(expect_kind, str) else expect_kind
        if kind not in allowed:
            raise ModelFileError(f"expected model kind {allowed}, found {kind!r}")
    digest = hashlib.sha256()
    arrays = {}
    try:
        for name in sorted(doc["arrays"]):
            entry = doc["arrays"][name]
            raw = base64.b64decode(entry["data"], validate=True)
            dtype = _DTYPES[entry["dtype"]]
            shape = tuple(int(s) for s in entry["shape"])
            if len(raw) != dtype.itemsize * int(np.prod(shape, dtype=np.int64)):
                raise ModelFileError(f"array {name!r}: payload does not match shape {shape}")
            digest.update(name.encode())
            digest.update(raw)
            arr = np.frombuffer(raw, dtype=dtype).reshape(shape)
            arrays[name] = arr.astype(arr.dtype.newbyteorder("="), copy=True)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"corrupt model file: {exc}") from None
    if digest.hexdigest() != doc.get("checksum"):
        raise ModelFileError("checksum mismatch: model file is corrupt")
    return kind, doc.get("meta", {}), arrays


def write(path, kind: str, meta: dict, arrays: dict) -> None:
    Path(path).write_text(dumps(kind, meta, arrays))


def read(path, expect_kind=None):
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise MissingFileError(f"model file not found: {path}") from None
    return loads(text, expect_kind)
