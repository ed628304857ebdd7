"""Score predictors: no-reference, full-reference, and partial-reference.

All three share the same shape: a visual backbone turns images into features,
a two-layer regression head turns one fused feature into one scalar score.
The partial-reference path handles batches where only some samples carry a
reference image: absent references are padded with a zero feature vector and
a per-sample mask (p0, p1) gates them out of the mean pooling

    f = (f_g * p0 + f_p * p1) / (p0 + p1)

so an all-padded batch reduces exactly to the no-reference predictor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import torch
from torch import nn


class DimensionMismatchError(ValueError):
    """Head input dimension does not match the fused feature dimension."""


class MaskConsistencyError(ValueError):
    """Padding mask contradicts reference presence in the batch."""


@dataclass(frozen=True)
class FeatureBundle:
    """Generated-image feature, reference feature, and the padding mask.

    mask is (p0, p1) with p0 fixed at 1; p1 = 0 marks a padded (absent)
    reference, in which case f_p must be the all-zero vector.
    """

    f_g: torch.Tensor
    f_p: torch.Tensor
    mask: tuple[int, int]

    def __post_init__(self) -> None:
        if self.f_g.dim() != 1 or self.f_p.dim() != 1:
            raise ValueError("feature vectors must be one-dimensional")
        if self.f_g.shape != self.f_p.shape:
            raise ValueError(
                f"feature dimensions differ: {tuple(self.f_g.shape)} vs {tuple(self.f_p.shape)}"
            )
        p0, p1 = self.mask
        if p0 != 1 or p1 not in (0, 1):
            raise ValueError(f"mask must be (1, 0) or (1, 1), got {self.mask}")
        if p1 == 0 and bool((self.f_p != 0).any()):
            raise ValueError("padded bundle (p1 = 0) must carry an all-zero reference feature")


class RegressionHead(nn.Module):
    """Two fully connected layers, in_dim -> in_dim // 2 -> 1.

    A rectifier sits between the layers; without it the pair would collapse to
    a single affine map.
    """

    def __init__(self, in_dim: int):
        super().__init__()
        if in_dim < 2:
            raise ValueError(f"head input dimension must be >= 2, got {in_dim}")
        self.in_dim = in_dim
        hidden = in_dim // 2
        self.fc1 = nn.Linear(in_dim, hidden)
        self.fc2 = nn.Linear(hidden, 1)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        if features.shape[-1] != self.in_dim:
            raise DimensionMismatchError(
                f"head expects dimension {self.in_dim}, got {features.shape[-1]}"
            )
        return self.fc2(torch.relu(self.fc1(features))).squeeze(-1)


def extract(backbone: nn.Module, images: torch.Tensor) -> torch.Tensor:
    """Run a batch through the backbone; (B, C, H, W) -> (B, D)."""
    if images.shape[0] == 0:
        dim = getattr(backbone, "feature_dim", None)
        if dim is None:
            raise ValueError("cannot infer feature dimension for an empty batch")
        return torch.zeros((0, dim), dtype=images.dtype, device=images.device)
    features = backbone(images)
    if features.dim() != 2:
        features = features.flatten(1)
    return features


def pool_masked(f_g: torch.Tensor, f_p: torch.Tensor, masks: torch.Tensor) -> torch.Tensor:
    """Mean-pool generated and reference features under per-sample masks.

    f_g, f_p: (B, D); masks: (B, 2) of {0, 1}. Identity on f_g when p1 = 0.
    """
    masks = masks.to(f_g.dtype)
    p0 = masks[:, :1]
    p1 = masks[:, 1:]
    return (f_g * p0 + f_p * p1) / (p0 + p1)


def fuse_pr(bundle: FeatureBundle) -> torch.Tensor:
    """Pool one validated bundle to its final (D,) feature."""
    masks = torch.tensor([bundle.mask], dtype=bundle.f_g.dtype, device=bundle.f_g.device)
    return pool_masked(bundle.f_g.unsqueeze(0), bundle.f_p.unsqueeze(0), masks).squeeze(0)


def _reference_masks(
    batch_size: int,
    references: Sequence[torch.Tensor | None] | None,
    masks: torch.Tensor | None,
    device,
) -> torch.Tensor:
    present = [references is not None and references[i] is not None for i in range(batch_size)]
    derived = torch.tensor([[1.0, 1.0 if p else 0.0] for p in present], device=device)
    if masks is not None:
        masks = masks.to(device)
        if masks.shape != derived.shape:
            raise MaskConsistencyError(
                f"mask shape {tuple(masks.shape)} does not match batch ({batch_size}, 2)"
            )
        for i, p in enumerate(present):
            if p and masks[i, 1].item() == 0:
                raise MaskConsistencyError(f"sample {i}: reference present but mask says absent")
            if not p and masks[i, 1].item() != 0:
                raise MaskConsistencyError(f"sample {i}: mask claims a reference that is absent")
    return derived


def visual_feature(
    backbone: nn.Module,
    mode: str,
    images: torch.Tensor,
    references=None,
    masks: torch.Tensor | None = None,
) -> torch.Tensor:
    """Fused visual feature per sample for the given mode, before any text fusion."""
    if mode == "nr":
        return extract(backbone, images)
    if mode == "fr":
        if references is None:
            raise ValueError("fr mode requires a reference batch")
        refs = references
        if not isinstance(refs, torch.Tensor):
            if any(r is None for r in refs):
                raise ValueError("fr mode requires a reference for every sample")
            refs = torch.stack(list(refs))
        if images.shape[0] != refs.shape[0]:
            raise ValueError(
                f"batch length mismatch: {images.shape[0]} images vs {refs.shape[0]} references"
            )
        return torch.cat([extract(backbone, images), extract(backbone, refs)], dim=1)
    if mode == "pr":
        batch = images.shape[0]
        mask_t = _reference_masks(batch, references, masks, images.device)
        f_g = extract(backbone, images)
        f_p = torch.zeros_like(f_g)
        if references is not None:
            present_idx = [i for i in range(batch) if references[i] is not None]
            if present_idx:
                stacked = torch.stack([references[i] for i in present_idx]).to(images.dtype)
                f_p[present_idx] = extract(backbone, stacked).to(f_p.dtype)
        return pool_masked(f_g, f_p, mask_t)
    raise ValueError(f"unknown fusion mode {mode!r}; expected nr, fr, or pr")


def predict_nr(backbone: nn.Module, head: RegressionHead, images: torch.Tensor) -> torch.Tensor:
    """No-reference scores: head(backbone(images))."""
    return head(visual_feature(backbone, "nr", images))


def predict_fr(
    backbone: nn.Module,
    head: RegressionHead,
    images: torch.Tensor,
    references: torch.Tensor,
) -> torch.Tensor:
    """Full-reference scores from a shared-weights backbone over both inputs,
    fused by concatenation (generated feature first)."""
    return head(visual_feature(backbone, "fr", images, references))


def predict_pr(
    backbone: nn.Module,
    head: RegressionHead,
    images: torch.Tensor,
    references: Sequence[torch.Tensor | None] | None = None,
    masks: torch.Tensor | None = None,
) -> torch.Tensor:
    """Partial-reference scores over a batch freely mixing samples with and
    without a reference image.

    `references` holds one (C, H, W) tensor or None per sample. Absent
    references are padded at the feature level: the backbone never sees them
    and their feature slot stays the zero vector. An explicit `masks` tensor,
    if given, is validated against actual reference presence.
    """
    return head(visual_feature(backbone, "pr", images, references, masks))


def fuse_text(visual: torch.Tensor, text: torch.Tensor | None) -> torch.Tensor:
    """Concatenate visual and text features along the last axis."""
    if text is None:
        raise ValueError("text feature is missing; the record has no usable text prompt")
    if visual.dim() != text.dim():
        raise ValueError(
            f"visual and text features must have the same rank, got {visual.dim()} vs {text.dim()}"
        )
    return torch.cat([visual, text], dim=-1)


def mse_loss(predicted: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Mean squared error between predicted and ground-truth scores."""
    if predicted.shape != labels.shape:
        raise ValueError(f"shape mismatch: {tuple(predicted.shape)} vs {tuple(labels.shape)}")
    if predicted.numel() == 0:
        raise ValueError("cannot compute a loss over an empty batch")
    diff = predicted - labels
    return (diff * diff).mean()


def fused_dim(mode: str, feature_dim: int, text_dim: int = 0) -> int:
    if mode == "fr":
        base = 2 * feature_dim
    elif mode in ("nr", "pr"):
        base = feature_dim
    else:
        raise ValueError(f"unknown fusion mode {mode!r}; expected nr, fr, or pr")
    return base + text_dim


class Assessor(nn.Module):
    """A backbone + regression head bound to one fusion mode.

    Text fusion, when enabled, concatenates a text-prompt feature to the
    visual feature before the head; text features are computed outside and
    passed in per batch.
    """

    def __init__(self, backbone: nn.Module, mode: str, feature_dim: int, text_dim: int = 0):
        super().__init__()
        self.mode = mode
        self.text_dim = text_dim
        self.feature_dim = feature_dim
        self.backbone = backbone
        self.head = RegressionHead(fused_dim(mode, feature_dim, text_dim))

    def forward(
        self,
        images: torch.Tensor,
        references=None,
        masks: torch.Tensor | None = None,
        text_features: torch.Tensor | None = None,
    ) -> torch.Tensor:
        fused = visual_feature(self.backbone, self.mode, images, references, masks)
        if self.text_dim:
            fused = fuse_text(fused, text_features)
        return self.head(fused)
