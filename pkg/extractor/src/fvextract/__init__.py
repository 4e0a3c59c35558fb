"""Pooled-activation feature extraction for FVS1 feature stores."""

from fvextract.backbone import NODE_NAMES, load_backbone, pooled_activations
from fvextract.dataset import ImageRecord, scan_category
from fvextract.extract import ExtractionJob, run_extraction
from fvextract.storeio import write_store

__all__ = [
    "NODE_NAMES",
    "load_backbone",
    "pooled_activations",
    "ImageRecord",
    "scan_category",
    "ExtractionJob",
    "run_extraction",
    "write_store",
]
