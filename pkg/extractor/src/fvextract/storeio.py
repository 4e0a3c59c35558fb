"""Writer for the FVS1 feature-store interchange format.

One store is a file pair sharing a stem: ``<stem>.fvs`` carries a
little-endian header (magic ``FVS1``, version, n, d as unsigned 32-bit ints)
followed by the n x d float32 matrix row-major, and ``<stem>.json`` carries
the per-row metadata manifest. This mirrors the format consumed by the
downstream modeling tool; only the writer lives here.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from fvextract.dataset import ImageRecord

MAGIC = b"FVS1"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_store(
    matrix: np.ndarray,
    records: list[ImageRecord],
    category: str,
    node: str,
    stem: Path,
    preprocess: dict | None = None,
) -> None:
    """Write ``<stem>.fvs`` and ``<stem>.json`` for one node and split."""
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError("feature matrix must be 2-dimensional")
    n, d = matrix.shape
    if n != len(records):
        raise ValueError(f"{n} rows but {len(records)} metadata records")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("feature matrix contains non-finite entries")

    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    header = _HEADER.pack(MAGIC, VERSION, n, d)
    # append extensions rather than with_suffix: stems may contain dots
    stem.parent.joinpath(stem.name + ".fvs").write_bytes(
        header + matrix.tobytes()
    )

    manifest = {
        "category": category,
        "node": node,
        "samples": [
            {
                "image_id": r.image_id,
                "split": r.split,
                "label": r.label,
                "anomaly_type": r.anomaly_type,
            }
            for r in records
        ],
    }
    if preprocess is not None:
        manifest["preprocess"] = preprocess
    with open(stem.parent / (stem.name + ".json"), "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
