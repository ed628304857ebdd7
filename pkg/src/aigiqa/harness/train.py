"""Training loop: per-dimension score regression with best-checkpoint selection.

Optimizes the mean squared error between predicted and MOS scores with Adam,
evaluating SRCC/PLCC on the test fold after every epoch and keeping the
checkpoint with the best eval SRCC. Fully seeded: two runs with the same
config produce identical loss curves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..assessor.backbones import build_backbone
from ..assessor.checkpoint import save_checkpoint
from ..assessor.model import Assessor, mse_loss
from ..assessor.text import build_text_encoder
from ..corpus import Corpus, SplitAssignment, fold_ids
from ..metrics import UndefinedCorrelationError
from ..subjective import MosLabel, label_map
from .config import TrainConfig, checkpoint_name, config_hash
from .data import AssessmentDataset
from .evaluate import metrics_record, predict_dataset


class FrModeDataError(ValueError):
    """fr mode needs a reference for every image; the corpus has T2I records."""


class MissingLabelsError(ValueError):
    pass


@dataclass
class TrainResult:
    checkpoint_path: Path
    history: list[dict]
    best_epoch: int
    best_srcc: float | None


def _labels_for(
    labels: list[MosLabel], dimension: str, image_ids: list[str]
) -> dict[str, float]:
    lookup = label_map(labels)
    missing = sorted(iid for iid in image_ids if (iid, dimension) not in lookup)
    if missing:
        raise MissingLabelsError(
            f"missing {dimension} labels for: {', '.join(missing)}"
        )
    return {iid: lookup[(iid, dimension)].mos for iid in image_ids}


def train(
    config: TrainConfig,
    corpus: Corpus,
    split: list[SplitAssignment],
    labels: list[MosLabel],
    out_dir: str | Path,
    log=print,
) -> TrainResult:
    if config.mode == "fr":
        t2i = sorted(r.image_id for r in corpus if r.subset != "I2I")
        if t2i:
            raise FrModeDataError(
                "fr mode requires a reference image for every record, but the corpus "
                f"contains {len(t2i)} T2I record(s) without one (e.g. {t2i[0]!r}); "
                "use nr or pr mode on mixed corpora"
            )

    train_ids = fold_ids(split, "train")
    test_ids = fold_ids(split, "test")
    train_labels = _labels_for(labels, config.dimension, train_ids)
    test_labels = _labels_for(labels, config.dimension, test_ids)

    device = torch.device(config.device)
    torch.manual_seed(config.seed)
    torch.use_deterministic_algorithms(True)

    backbone, spec = build_backbone(
        config.backbone, pretrained=config.pretrained, seed=config.seed
    )
    text_encoder = None
    text_dim = 0
    if config.text_fusion:
        text_encoder = build_text_encoder(config.text_encoder, freeze=config.freeze_text)
        text_dim = text_encoder.dim
    assessor = Assessor(backbone, config.mode, spec.feature_dim, text_dim=text_dim).to(device)

    if config.freeze_backbone:
        for p in assessor.backbone.parameters():
            p.requires_grad_(False)
    params = [p for p in assessor.parameters() if p.requires_grad]
    if text_encoder is not None and not config.freeze_text:
        params += list(text_encoder.parameters())
    optimizer = torch.optim.Adam(
        params, lr=config.learning_rate, weight_decay=config.weight_decay
    )

    with_refs = config.mode in ("fr", "pr")
    train_set = AssessmentDataset(
        corpus, train_ids, train_labels, spec.policy,
        mode="train", with_references=with_refs, seed=config.seed,
    )
    eval_set = AssessmentDataset(
        corpus, test_ids, test_labels, spec.policy,
        mode="eval", with_references=with_refs,
    )
    eval_truth = np.array([test_labels[iid] for iid in test_ids])

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt_path = out_dir / checkpoint_name(config)
    cfg_hash = config_hash(config)

    def encode_text(prompts):
        if text_encoder is None:
            return None
        if config.freeze_text:
            with torch.no_grad():
                return text_encoder.encode(prompts)
        return text_encoder.encode(prompts)

    batch_gen = torch.Generator().manual_seed(config.seed)
    history: list[dict] = []
    best_srcc: float | None = None
    best_epoch = -1

    def save_best() -> None:
        save_checkpoint(
            ckpt_path,
            assessor,
            backbone_name=config.backbone,
            dimension=config.dimension,
            text_encoder_name=config.text_encoder if config.text_fusion else None,
            text_encoder_state=text_encoder.state_dict() if text_encoder is not None else None,
            policy=spec.policy,
            config_hash=cfg_hash,
            seed=config.seed,
        )

    for epoch in range(config.epochs):
        train_set.set_epoch(epoch)
        assessor.train()
        total, count = 0.0, 0
        for batch in train_set.batches(config.batch_size, generator=batch_gen):
            images = batch["images"].to(device)
            targets = batch["labels"].to(device)
            references = batch["references"] if with_refs else None
            predictions = assessor(
                images, references=references, text_features=encode_text(batch["text_prompts"])
            )
            loss = mse_loss(predictions, targets)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * len(targets)
            count += len(targets)
        train_loss = total / count

        predicted = predict_dataset(
            assessor, eval_set, text_encoder=text_encoder, batch_size=config.eval_batch_size
        )
        try:
            eval_metrics = metrics_record(eval_truth, predicted)
            eval_srcc, eval_plcc = eval_metrics["srcc"], eval_metrics["plcc"]
        except UndefinedCorrelationError:
            eval_srcc = eval_plcc = None

        history.append(
            {"epoch": epoch, "train_loss": train_loss,
             "eval_srcc": eval_srcc, "eval_plcc": eval_plcc}
        )
        log(
            f"epoch {epoch:3d}  loss {train_loss:.5f}  "
            f"eval srcc {eval_srcc if eval_srcc is None else f'{eval_srcc:.4f}'}  "
            f"plcc {eval_plcc if eval_plcc is None else f'{eval_plcc:.4f}'}"
        )
        if eval_srcc is not None and (best_srcc is None or eval_srcc > best_srcc):
            best_srcc = eval_srcc
            best_epoch = epoch
            save_best()

    if best_epoch < 0:
        # eval SRCC never defined (e.g. constant predictions); keep the last state
        best_epoch = config.epochs - 1
        save_best()

    history_path = ckpt_path.with_name(ckpt_path.stem + "_history.jsonl")
    with open(history_path, "w", encoding="utf-8") as fh:
        for row in history:
            fh.write(json.dumps(row) + "\n")

    return TrainResult(
        checkpoint_path=ckpt_path, history=history, best_epoch=best_epoch, best_srcc=best_srcc
    )
