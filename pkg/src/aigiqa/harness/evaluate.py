"""Deterministic evaluation of a checkpoint over a split fold."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from ..assessor.checkpoint import load_checkpoint
from ..corpus import Corpus, SplitAssignment, fold_ids
from ..metrics import plcc, srcc
from ..subjective import MosLabel, label_map
from .data import AssessmentDataset


class EmptyFoldError(ValueError):
    pass


SCOPES = ("full", "t2i", "i2i")


def scope_filter(corpus: Corpus, image_ids: list[str], scope: str) -> list[str]:
    if scope == "full":
        return list(image_ids)
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
    subset = scope.upper()
    return [iid for iid in image_ids if corpus[iid].subset == subset]


def predict_dataset(
    assessor, dataset: AssessmentDataset, text_encoder=None, batch_size: int = 20
) -> np.ndarray:
    """Eval-mode predictions over a dataset, in dataset order."""
    assessor.eval()
    scores: list[np.ndarray] = []
    with torch.no_grad():
        for batch in dataset.batches(batch_size):
            text_features = None
            if assessor.text_dim:
                text_features = text_encoder.encode(batch["text_prompts"])
            references = batch["references"] if assessor.mode in ("fr", "pr") else None
            out = assessor(batch["images"], references=references, text_features=text_features)
            scores.append(out.detach().cpu().numpy())
    return np.concatenate(scores) if scores else np.empty(0)


def metrics_record(truth, predicted) -> dict:
    return {
        "srcc": srcc(truth, predicted),
        "plcc": plcc(truth, predicted),
        "n": int(np.asarray(truth).shape[0]),
    }


def evaluate(
    checkpoint: str | Path,
    corpus: Corpus,
    split: list[SplitAssignment],
    labels: list[MosLabel],
    fold: str = "test",
    scope: str = "full",
    batch_size: int = 20,
    split_path: str | None = None,
    labels_path: str | None = None,
) -> dict:
    """SRCC/PLCC of a checkpoint on one fold, with full traceability fields."""
    assessor, meta = load_checkpoint(checkpoint)
    dimension = meta["dimension"]
    ids = scope_filter(corpus, fold_ids(split, fold), scope)
    if not ids:
        raise EmptyFoldError(f"no {scope} images in the {fold} fold")
    lookup = label_map(labels)
    missing = [iid for iid in ids if (iid, dimension) not in lookup]
    if missing:
        raise ValueError(f"missing {dimension} labels for: {', '.join(sorted(missing))}")
    truth_by_id = {iid: lookup[(iid, dimension)].mos for iid in ids}

    dataset = AssessmentDataset(
        corpus,
        ids,
        truth_by_id,
        meta["policy"],
        mode="eval",
        with_references=assessor.mode in ("fr", "pr"),
    )
    predicted = predict_dataset(
        assessor, dataset, text_encoder=meta.get("text_encoder_module"), batch_size=batch_size
    )
    truth = np.array([truth_by_id[iid] for iid in ids])

    record = {
        "method": meta["mode"] + ("-tier" if meta["text_dim"] else ""),
        "backbone": meta["backbone"],
        "mode": meta["mode"],
        "text_fusion": bool(meta["text_dim"]),
        "dimension": dimension,
        "scope": scope,
        "fold": fold,
        "checkpoint": str(checkpoint),
        "config_hash": meta.get("config_hash", ""),
        "split": split_path,
        "labels": labels_path,
    }
    record.update(metrics_record(truth, predicted))
    return record
