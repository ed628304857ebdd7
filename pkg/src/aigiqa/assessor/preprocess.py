"""Image preprocessing: resize, crop, flip augmentation, normalization.

Training uses resize -> random crop -> random horizontal flip; evaluation uses
resize -> center crop with no flip, so eval outputs are bit-stable. Pixel
normalization follows the statistics the backbone was pretrained with.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import torch
from PIL import Image


@dataclass(frozen=True)
class PreprocessPolicy:
    resize_to: int
    crop_to: int
    random_crop: bool = True
    hflip_prob: float = 0.5
    mean: tuple[float, float, float] = (0.485, 0.456, 0.406)
    std: tuple[float, float, float] = (0.229, 0.224, 0.225)

    def __post_init__(self) -> None:
        if self.crop_to > self.resize_to:
            raise ValueError(
                f"crop_to ({self.crop_to}) must not exceed resize_to ({self.resize_to})"
            )
        if not 0.0 <= self.hflip_prob <= 1.0:
            raise ValueError(f"hflip_prob must be a probability, got {self.hflip_prob}")


# 224-input backbones: resize 256 then crop 224; 299-input ones: resize 320 then crop 299
DEFAULT_POLICY = PreprocessPolicy(resize_to=256, crop_to=224)
INCEPTION_POLICY = PreprocessPolicy(resize_to=320, crop_to=299)


def to_tensor(img: Image.Image) -> torch.Tensor:
    """HWC uint8 PIL image -> CHW float tensor in [0, 1]."""
    import numpy as np

    arr = np.asarray(img.convert("RGB"), dtype="float32") / 255.0
    return torch.from_numpy(arr).permute(2, 0, 1).contiguous()


def preprocess(
    img: Image.Image,
    policy: PreprocessPolicy,
    mode: str = "eval",
    rng: random.Random | None = None,
) -> torch.Tensor:
    """Produce a normalized crop_to x crop_to tensor from a PIL image."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    if mode == "train" and rng is None:
        rng = random.Random()

    img = img.convert("RGB").resize((policy.resize_to, policy.resize_to), Image.BILINEAR)
    size = policy.resize_to
    crop = policy.crop_to
    if mode == "train" and policy.random_crop:
        left = rng.randint(0, size - crop)
        top = rng.randint(0, size - crop)
    else:
        left = (size - crop) // 2
        top = (size - crop) // 2
    img = img.crop((left, top, left + crop, top + crop))
    if mode == "train" and rng.random() < policy.hflip_prob:
        img = img.transpose(Image.FLIP_LEFT_RIGHT)

    tensor = to_tensor(img)
    mean = torch.tensor(policy.mean).view(3, 1, 1)
    std = torch.tensor(policy.std).view(3, 1, 1)
    return (tensor - mean) / std


def load_image(path) -> Image.Image:
    with Image.open(path) as img:
        return img.convert("RGB")
