"""EfficientNet-B0 backbone with pooled activations from its nine stages.

The backbone's ``features`` module is a sequence of nine stages. For each
requested stage we take its output tensor and average over the spatial axes,
leaving one vector per image whose length is the stage's channel count.
"""

from __future__ import annotations

import torch
from torchvision.models import EfficientNet_B0_Weights, efficientnet_b0

NODE_NAMES = tuple(f"features.{i}" for i in range(9))

# fixed inference preprocessing published with the classification weights
_WEIGHTS_ENUM = EfficientNet_B0_Weights.IMAGENET1K_V1
_RANDOM_INIT_SEED = 0


def preprocess_transform():
    """The canonical inference transform (resize, center-crop, normalize)."""
    return _WEIGHTS_ENUM.transforms()


def preprocess_description() -> dict:
    """Manifest-ready record of the input resolution and normalization."""
    t = _WEIGHTS_ENUM.transforms()
    return {
        "backbone": "efficientnet_b0",
        "resize": list(t.resize_size),
        "crop": list(t.crop_size),
        "mean": list(t.mean),
        "std": list(t.std),
    }


def load_backbone(weights: str = "imagenet") -> torch.nn.Module:
    """Build the backbone in evaluation mode.

    ``weights="imagenet"`` loads the published classification weights
    (requires the checkpoint to be downloadable or cached).
    ``weights="none"`` uses a fixed-seed random initialization, which keeps
    extraction deterministic and lets the pipeline run fully offline.
    """
    if weights == "imagenet":
        model = efficientnet_b0(weights=_WEIGHTS_ENUM)
    elif weights == "none":
        torch.manual_seed(_RANDOM_INIT_SEED)
        model = efficientnet_b0(weights=None)
    else:
        raise ValueError(f"unknown weights option {weights!r}")
    model.eval()
    return model


def node_indices(nodes: list[str]) -> list[int]:
    """Map node names to stage indices, rejecting anything unknown."""
    indices = []
    for name in nodes:
        if name not in NODE_NAMES:
            raise ValueError(
                f"unknown node name {name!r}; expected one of {NODE_NAMES}"
            )
        indices.append(int(name.split(".")[1]))
    return indices


@torch.no_grad()
def pooled_activations(
    model: torch.nn.Module, batch: torch.Tensor, nodes: list[str]
) -> dict[str, torch.Tensor]:
    """Run one image batch and pool the requested stage outputs.

    Returns a mapping from node name to an (n, channels) float tensor; the
    spatial axes are removed by global average pooling.
    """
    wanted = set(node_indices(nodes))
    deepest = max(wanted)
    out: dict[str, torch.Tensor] = {}
    x = batch
    for i, stage in enumerate(model.features):
        x = stage(x)
        if i in wanted:
            out[f"features.{i}"] = x.mean(dim=(2, 3))
        if i == deepest:
            break
    return out
