"""Training configuration and artifact naming.

Defaults are the published training recipe: Adam with learning rate 1e-4 and
weight decay 1e-5, batch size 8 for training and 20 for testing, one model per
score dimension. Changing any of them requires an explicit config entry, an
environment variable, or a CLI flag.

Precedence: defaults < config file < environment < explicit overrides.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .. import DIMENSIONS

MODES = ("nr", "fr", "pr")


@dataclass
class TrainConfig:
    backbone: str = "stub"
    mode: str = "nr"
    text_fusion: bool = False
    text_encoder: str = "hash"
    dimension: str = "quality"
    batch_size: int = 8
    eval_batch_size: int = 20
    learning_rate: float = 1e-4
    weight_decay: float = 1e-5
    epochs: int = 50
    seed: int = 0
    device: str = "cpu"
    pretrained: bool = True
    freeze_backbone: bool = False
    freeze_text: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"dimension must be one of {DIMENSIONS}, got {self.dimension!r}")
        if self.batch_size < 1 or self.eval_batch_size < 1:
            raise ValueError("batch sizes must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    @property
    def method_label(self) -> str:
        return self.mode + ("-tier" if self.text_fusion else "")


_ENV_PREFIX = "AIGIQA_"
_BOOL_FIELDS = {"text_fusion", "pretrained", "freeze_backbone", "freeze_text"}


def _coerce(name: str, value: str):
    if name in _BOOL_FIELDS:
        return value.strip().lower() in ("1", "true", "yes", "on")
    if name in ("batch_size", "eval_batch_size", "epochs", "seed"):
        return int(value)
    if name in ("learning_rate", "weight_decay"):
        return float(value)
    return value


def load_train_config(
    path: str | Path | None = None,
    env: dict | None = None,
    overrides: dict | None = None,
) -> TrainConfig:
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        known = {f.name for f in fields(TrainConfig)}
        unknown = set(file_cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        raw.update(file_cfg)
    for f in fields(TrainConfig):
        key = _ENV_PREFIX + f.name.upper()
        if key in env:
            raw[f.name] = _coerce(f.name, env[key])
    for name, value in (overrides or {}).items():
        if value is not None:
            raw[name] = value
    return TrainConfig(**raw)


def config_hash(config: TrainConfig) -> str:
    """Short content hash over the canonical config encoding."""
    blob = json.dumps(asdict(config), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:10]


def checkpoint_name(config: TrainConfig) -> str:
    return (
        f"ckpt_{config.method_label}_{config.backbone}_{config.dimension}"
        f"_seed{config.seed}_{config_hash(config)}.pt"
    )


def split_name(ratio: float, seed: int) -> str:
    ratio_txt = f"{ratio:g}".replace(".", "p")
    return f"split_ratio{ratio_txt}to1_seed{seed}.jsonl"


def labels_name(store_path: str | Path) -> str:
    digest = hashlib.sha256(Path(store_path).read_bytes()).hexdigest()[:10]
    return f"mos_labels_{digest}.jsonl"
