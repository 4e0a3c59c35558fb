import numpy as np
import pytest
from PIL import Image


def _write_image(path, seed):
    """Small deterministic RGB image with per-file content."""
    gen = np.random.default_rng(seed)
    pixels = gen.integers(0, 256, size=(48, 48, 3), dtype=np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels).save(path)


@pytest.fixture(scope="session")
def mini_dataset(tmp_path_factory):
    """A 10-image dataset tree: 4 train good, 2 test good, 4 anomalous."""
    root = tmp_path_factory.mktemp("dataset")
    layout = {
        "bottle/train/good": ["000.png", "001.png", "002.png", "003.png"],
        "bottle/test/good": ["000.png", "001.png"],
        "bottle/test/scratch": ["000.png", "001.png"],
        "bottle/test/dent": ["000.png", "001.png"],
    }
    seed = 0
    for subdir, names in layout.items():
        for name in names:
            _write_image(root / subdir / name, seed)
            seed += 1
    return root
