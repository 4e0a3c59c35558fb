"""On-disk feature store: binary FVS1 matrices plus JSON metadata manifests.

A feature set is stored as two files sharing a stem: ``<stem>.fvs`` holds the
n x d float32 matrix in a fixed little-endian binary layout, and
``<stem>.json`` holds the per-sample metadata. The binary half is bit-exact
across platforms; the JSON half stays human-auditable.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Literal

import numpy as np

MAGIC = b"FVS1"
VERSION = 1
_HEADER = struct.Struct("<4sIII")

Split = Literal["train", "test"]
Label = Literal["normal", "anomalous"]


class StoreFormatError(ValueError):
    """A feature-store file violates the FVS1 format contract."""


@dataclass(frozen=True)
class SampleMeta:
    """Metadata for one row of a feature matrix."""

    image_id: str
    split: Split
    label: Label
    anomaly_type: str

    def __post_init__(self):
        if self.split not in ("train", "test"):
            raise ValueError(f"unknown split {self.split!r}")
        if self.label not in ("normal", "anomalous"):
            raise ValueError(f"unknown label {self.label!r}")
        if (self.label == "normal") != (self.anomaly_type == "good"):
            raise ValueError(
                f"label {self.label!r} inconsistent with anomaly type "
                f"{self.anomaly_type!r}"
            )
        if self.split == "train" and self.label != "normal":
            raise ValueError("train samples must be normal")


@dataclass
class FeatureSet:
    """An n x d float32 matrix with aligned per-row metadata."""

    matrix: np.ndarray
    samples: list[SampleMeta]
    node_name: str
    category: str

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float32)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-dimensional")
        n, d = self.matrix.shape
        if n < 1 or d < 1:
            raise ValueError(f"matrix must be non-empty, got shape {n}x{d}")
        if len(self.samples) != n:
            raise ValueError(
                f"metadata length {len(self.samples)} != matrix rows {n}"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix contains non-finite entries")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    def anomaly_types(self) -> list[str]:
        """Distinct anomalous types present, in first-appearance order."""
        seen: dict[str, None] = {}
        for s in self.samples:
            if s.label == "anomalous":
                seen.setdefault(s.anomaly_type)
        return list(seen)


def write_feature_set(fset: FeatureSet, path) -> None:
    """Write ``<path>.fvs`` and ``<path>.json`` for a valid feature set."""
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, fset.n, fset.d)
    payload = np.ascontiguousarray(fset.matrix, dtype="<f4").tobytes()
    # append extensions rather than with_suffix: stems may contain dots
    path.parent.joinpath(path.name + ".fvs").write_bytes(header + payload)

    manifest = {
        "category": fset.category,
        "node": fset.node_name,
        "samples": [
            {
                "image_id": s.image_id,
                "split": s.split,
                "label": s.label,
                "anomaly_type": s.anomaly_type,
            }
            for s in fset.samples
        ],
    }
    with open(path.parent / (path.name + ".json"), "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")


def read_feature_set(path) -> FeatureSet:
    """Load and validate the ``<path>.fvs`` / ``<path>.json`` pair."""
    path = Path(path)
    fvs_path = path.parent / (path.name + ".fvs")
    json_path = path.parent / (path.name + ".json")
    for p in (fvs_path, json_path):
        if not p.exists():
            raise StoreFormatError(f"missing file: {p}")

    raw = fvs_path.read_bytes()
    if len(raw) < _HEADER.size:
        raise StoreFormatError("file shorter than FVS1 header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise StoreFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise StoreFormatError(f"unsupported version {version}")
    if n == 0 or d == 0:
        raise StoreFormatError(f"degenerate dimensions n={n}, d={d}")
    expected = _HEADER.size + 4 * n * d
    if len(raw) != expected:
        raise StoreFormatError(
            f"payload length mismatch: file has {len(raw)} bytes, "
            f"expected {expected}"
        )
    matrix = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n, d)
    if not np.all(np.isfinite(matrix)):
        raise StoreFormatError("matrix contains non-finite entries")

    with open(json_path) as f:
        manifest = json.load(f)
    try:
        samples = [
            SampleMeta(
                image_id=s["image_id"],
                split=s["split"],
                label=s["label"],
                anomaly_type=s["anomaly_type"],
            )
            for s in manifest["samples"]
        ]
        category = manifest["category"]
        node = manifest["node"]
    except (KeyError, TypeError) as exc:
        raise StoreFormatError(f"malformed manifest: {exc}") from exc
    if len(samples) != n:
        raise StoreFormatError(
            f"manifest lists {len(samples)} samples over a {n}-row matrix"
        )
    return FeatureSet(
        matrix=matrix.copy(), samples=samples, node_name=node, category=category
    )


def filter_samples(
    fset: FeatureSet, predicate: Callable[[SampleMeta], bool]
) -> FeatureSet:
    """Keep exactly the rows whose metadata satisfies the predicate.

    Row order is preserved. Raises if nothing matches, since an empty
    feature set is not representable.
    """
    keep = [i for i, s in enumerate(fset.samples) if predicate(s)]
    if not keep:
        raise ValueError("predicate matched no samples")
    return replace(
        fset,
        matrix=fset.matrix[keep],
        samples=[fset.samples[i] for i in keep],
    )
