"""Checkpoint serialization for trained assessors.

A checkpoint carries everything needed to rebuild and run the model: backbone
name, fusion mode, text-fusion settings, head and backbone weights, the
preprocessing policy, the score dimension it was trained for, and the training
config hash for traceability.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

import torch

from .backbones import StubBackbone, backbone_spec, build_backbone
from .model import Assessor
from .preprocess import PreprocessPolicy
from .text import build_text_encoder

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path,
    assessor: Assessor,
    backbone_name: str,
    dimension: str,
    text_encoder_name: str | None = None,
    text_encoder_state: dict | None = None,
    policy: PreprocessPolicy | None = None,
    config_hash: str = "",
    seed: int | None = None,
    extra: dict | None = None,
) -> None:
    spec = backbone_spec(backbone_name)
    backbone_args = {}
    if isinstance(assessor.backbone, StubBackbone):
        backbone_args = {
            "feature_dim": assessor.backbone.feature_dim,
            "pool": assessor.backbone.pool,
        }
    payload = {
        "format": FORMAT_VERSION,
        "backbone": backbone_name,
        "backbone_args": backbone_args,
        "mode": assessor.mode,
        "feature_dim": assessor.feature_dim,
        "text_dim": assessor.text_dim,
        "text_encoder": text_encoder_name,
        "text_encoder_state": text_encoder_state,
        "dimension": dimension,
        "policy": asdict(policy if policy is not None else spec.policy),
        "config_hash": config_hash,
        "seed": seed,
        "head_state": assessor.head.state_dict(),
        "backbone_state": assessor.backbone.state_dict(),
        "extra": extra or {},
    }
    torch.save(payload, str(path))


def load_checkpoint(path: str | Path) -> tuple[Assessor, dict]:
    """Rebuild an Assessor (and optional text encoder) from a checkpoint.

    Returns (assessor, meta); when the checkpoint used text fusion, the
    restored encoder is available as meta["text_encoder_module"].
    """
    payload = torch.load(str(path), map_location="cpu", weights_only=False)
    if payload.get("format") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format: {payload.get('format')!r}")
    if payload["backbone"] == "stub":
        backbone: torch.nn.Module = StubBackbone(**payload.get("backbone_args", {}))
    else:
        backbone, _ = build_backbone(payload["backbone"], pretrained=False)
    assessor = Assessor(
        backbone,
        mode=payload["mode"],
        feature_dim=payload["feature_dim"],
        text_dim=payload["text_dim"],
    )
    assessor.backbone.load_state_dict(payload["backbone_state"])
    assessor.head.load_state_dict(payload["head_state"])
    assessor.eval()

    meta = {k: v for k, v in payload.items() if not k.endswith("_state")}
    meta["policy"] = PreprocessPolicy(
        **{
            **payload["policy"],
            "mean": tuple(payload["policy"]["mean"]),
            "std": tuple(payload["policy"]["std"]),
        }
    )
    if payload.get("text_encoder"):
        encoder = build_text_encoder(payload["text_encoder"])
        if payload.get("text_encoder_state"):
            encoder.load_state_dict(payload["text_encoder_state"])
        encoder.eval()
        meta["text_encoder_module"] = encoder
    return assessor, meta
