"""Directory walking for industrial-inspection style image datasets.

Expected layout under the dataset root::

    <root>/<category>/train/good/*.png
    <root>/<category>/test/<anomaly_type>/*.png

The ``good`` subdirectory holds normal images; every other test subdirectory
name is taken as an anomaly type. Rows are ordered lexicographically by
(anomaly_type, filename) so repeated runs produce identical manifests.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from PIL import Image

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}


@dataclass(frozen=True)
class ImageRecord:
    """One dataset image with the metadata its path encodes."""

    path: Path
    image_id: str
    split: str  # "train" | "test"
    label: str  # "normal" | "anomalous"
    anomaly_type: str


def _image_files(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )


def scan_category(root: Path, category: str) -> dict[str, list[ImageRecord]]:
    """Collect ordered image records for both splits of one category."""
    root = Path(root)
    category_dir = root / category
    train_dir = category_dir / "train" / "good"
    test_dir = category_dir / "test"
    for required in (category_dir, train_dir, test_dir):
        if not required.is_dir():
            raise FileNotFoundError(f"missing dataset directory: {required}")

    train = [
        ImageRecord(
            path=p,
            image_id=f"train/good/{p.name}",
            split="train",
            label="normal",
            anomaly_type="good",
        )
        for p in _image_files(train_dir)
    ]

    test = []
    for type_dir in sorted(d for d in test_dir.iterdir() if d.is_dir()):
        anomaly_type = type_dir.name
        label = "normal" if anomaly_type == "good" else "anomalous"
        for p in _image_files(type_dir):
            test.append(
                ImageRecord(
                    path=p,
                    image_id=f"test/{anomaly_type}/{p.name}",
                    split="test",
                    label=label,
                    anomaly_type=anomaly_type,
                )
            )
    test.sort(key=lambda r: (r.anomaly_type, r.path.name))

    if not train:
        raise FileNotFoundError(f"no training images under {train_dir}")
    if not test:
        raise FileNotFoundError(f"no test images under {test_dir}")
    return {"train": train, "test": test}


def load_image(record: ImageRecord) -> Image.Image:
    """Open one image as RGB, surfacing unreadable files clearly."""
    try:
        with Image.open(record.path) as img:
            return img.convert("RGB")
    except OSError as exc:
        raise OSError(f"unreadable image {record.path}: {exc}") from exc
