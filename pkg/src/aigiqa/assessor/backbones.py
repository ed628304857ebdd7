"""Pretrained visual backbones behind a uniform (B, C, H, W) -> (B, D) surface.

Real backbones come from torchvision with their classification heads removed.
The "stub" backbone is a fixed seeded linear map over average-pooled pixels:
deterministic, CPU-cheap, and analytically tractable, which makes exact
oracles and CPU-only CI possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

from .preprocess import DEFAULT_POLICY, INCEPTION_POLICY, PreprocessPolicy

# the stub has no pretraining statistics; raw [0, 1] pixels
STUB_POLICY = PreprocessPolicy(
    resize_to=256, crop_to=224, mean=(0.0, 0.0, 0.0), std=(1.0, 1.0, 1.0)
)


@dataclass(frozen=True)
class BackboneSpec:
    name: str
    feature_dim: int
    input_size: int
    pretrained: bool
    policy: PreprocessPolicy


class StubBackbone(nn.Module):
    """Seeded linear map over downsampled pixels.

    Pixels are average-pooled to a pool x pool grid, flattened, and projected
    to feature_dim by a trainable linear layer whose initialization is fully
    determined by `seed`.
    """

    def __init__(self, feature_dim: int = 512, pool: int = 4, seed: int = 0, gain: float = 1.0):
        super().__init__()
        self.feature_dim = feature_dim
        self.pool = pool
        in_dim = 3 * pool * pool
        self.proj = nn.Linear(in_dim, feature_dim)
        gen = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            self.proj.weight.copy_(
                torch.randn(feature_dim, in_dim, generator=gen) * (gain / math.sqrt(in_dim))
            )
            self.proj.bias.copy_(torch.randn(feature_dim, generator=gen) * 0.1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        pooled = nn.functional.adaptive_avg_pool2d(x, self.pool).flatten(1)
        return self.proj(pooled.to(self.proj.weight.dtype))


def _strip_classifier(name: str, model: nn.Module) -> nn.Module:
    if name.startswith("vgg"):
        model.classifier[6] = nn.Identity()
    elif name.startswith("resnet"):
        model.fc = nn.Identity()
    elif name == "inception_v3":
        model.fc = nn.Identity()
        model.aux_logits = False
        model.AuxLogits = None
    elif name.startswith("vit"):
        model.heads = nn.Identity()
    else:
        raise ValueError(f"no classifier-stripping rule for {name!r}")
    return model


# name -> (feature_dim, input_size, policy)
_TORCHVISION = {
    "vgg16": (4096, 224, DEFAULT_POLICY),
    "vgg19": (4096, 224, DEFAULT_POLICY),
    "resnet18": (512, 224, DEFAULT_POLICY),
    "resnet50": (2048, 224, DEFAULT_POLICY),
    "inception_v3": (2048, 299, INCEPTION_POLICY),
    "vit_l_16": (1024, 224, DEFAULT_POLICY),
}

_ALIASES = {"vit_large_patch16_224": "vit_l_16"}

BACKBONES = ("stub",) + tuple(_TORCHVISION)


def backbone_spec(name: str, pretrained: bool = False) -> BackboneSpec:
    name = _ALIASES.get(name, name)
    if name == "stub":
        return BackboneSpec("stub", 512, 224, False, STUB_POLICY)
    if name not in _TORCHVISION:
        raise ValueError(f"unknown backbone {name!r}; known: {', '.join(BACKBONES)}")
    dim, size, policy = _TORCHVISION[name]
    return BackboneSpec(name, dim, size, pretrained, policy)


def build_backbone(name: str, pretrained: bool = False, seed: int = 0) -> tuple[nn.Module, BackboneSpec]:
    """Construct a backbone and its spec. Non-stub init draws from torch's
    global RNG unless pretrained weights are loaded."""
    spec = backbone_spec(name, pretrained)
    if spec.name == "stub":
        model: nn.Module = StubBackbone(feature_dim=spec.feature_dim, seed=seed)
    else:
        import torchvision.models

        weights = "DEFAULT" if pretrained else None
        if spec.name == "inception_v3" and not pretrained:
            model = torchvision.models.inception_v3(weights=None, aux_logits=False, init_weights=True)
            model.fc = nn.Identity()
        else:
            model = torchvision.models.get_model(spec.name, weights=weights)
            model = _strip_classifier(spec.name, model)
    model.feature_dim = spec.feature_dim
    return model, spec
