"""Extraction driver: images in, one feature-store pair per node and split."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from fvextract.backbone import (
    NODE_NAMES,
    load_backbone,
    node_indices,
    pooled_activations,
    preprocess_description,
    preprocess_transform,
)
from fvextract.dataset import ImageRecord, load_image, scan_category
from fvextract.storeio import write_store


@dataclass(frozen=True)
class ExtractionJob:
    """One extraction request for a single dataset category."""

    dataset_root: Path
    category: str
    nodes: tuple[str, ...]
    output_dir: Path
    batch_size: int = 8
    weights: str = "imagenet"

    def __post_init__(self):
        node_indices(list(self.nodes))  # validates names
        if not self.nodes:
            raise ValueError("at least one node required")
        if self.batch_size < 1:
            raise ValueError("batch size must be positive")


def _batches(records: list[ImageRecord], size: int):
    for start in range(0, len(records), size):
        yield records[start:start + size]


def _extract_split(
    model, transform, records: list[ImageRecord], nodes: list[str],
    batch_size: int,
) -> dict[str, np.ndarray]:
    chunks: dict[str, list[np.ndarray]] = {n: [] for n in nodes}
    for batch_records in _batches(records, batch_size):
        batch = torch.stack(
            [transform(load_image(r)) for r in batch_records]
        )
        pooled = pooled_activations(model, batch, nodes)
        for name in nodes:
            chunks[name].append(pooled[name].numpy().astype(np.float32))
    return {name: np.vstack(parts) for name, parts in chunks.items()}


def run_extraction(job: ExtractionJob) -> list[Path]:
    """Run the backbone over both splits and write all requested stores.

    Returns the stems of the written store pairs, train split first, in the
    order the nodes were requested.
    """
    splits = scan_category(job.dataset_root, job.category)
    model = load_backbone(job.weights)
    transform = preprocess_transform()
    preprocess = preprocess_description()
    preprocess["weights"] = job.weights

    nodes = list(job.nodes)
    out_dir = Path(job.output_dir)
    written = []
    for split in ("train", "test"):
        records = splits[split]
        matrices = _extract_split(
            model, transform, records, nodes, job.batch_size
        )
        for name in nodes:
            stem = out_dir / f"{job.category}__{name}__{split}"
            write_store(
                matrices[name], records, job.category, name, stem,
                preprocess=preprocess,
            )
            written.append(stem)
    return written


__all__ = ["ExtractionJob", "run_extraction", "NODE_NAMES"]
