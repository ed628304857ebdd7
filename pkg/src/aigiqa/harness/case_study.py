"""Side-by-side prediction record for a single test image.

Given per-dimension checkpoints for one or more methods, predicts every
dimension of one image and lays the predictions next to the ground-truth MOS,
mirroring how individual images are inspected when comparing methods.
"""

from __future__ import annotations

from pathlib import Path

from ..assessor.checkpoint import load_checkpoint
from ..corpus import Corpus, SplitAssignment, fold_ids
from ..subjective import MosLabel, label_map
from .data import AssessmentDataset
from .evaluate import predict_dataset


def case_study(
    checkpoints: list[str | Path],
    image_id: str,
    corpus: Corpus,
    split: list[SplitAssignment],
    labels: list[MosLabel],
) -> dict:
    if image_id not in corpus.by_id:
        raise ValueError(f"unknown image {image_id!r}")
    if image_id not in set(fold_ids(split, "test")):
        raise ValueError(f"image {image_id!r} is not in the test fold")
    record = corpus[image_id]

    loaded: dict[str, dict[str, tuple]] = {}
    for path in checkpoints:
        assessor, meta = load_checkpoint(path)
        method = meta["mode"] + ("-tier" if meta["text_dim"] else "")
        label = f"{method} ({meta['backbone']})"
        slot = loaded.setdefault(label, {})
        if meta["dimension"] in slot:
            raise ValueError(f"method {label!r} has two checkpoints for {meta['dimension']!r}")
        slot[meta["dimension"]] = (assessor, meta)

    dimension_sets = {label: frozenset(slots) for label, slots in loaded.items()}
    if len(set(dimension_sets.values())) > 1:
        detail = "; ".join(f"{k}: {sorted(v)}" for k, v in sorted(dimension_sets.items()))
        raise ValueError(f"checkpoints must share one dimension set, got {detail}")
    dimensions = sorted(next(iter(dimension_sets.values())))

    lookup = label_map(labels)
    truth = {}
    for dim in dimensions:
        if (image_id, dim) not in lookup:
            raise ValueError(f"missing {dim} label for image {image_id!r}")
        truth[dim] = lookup[(image_id, dim)].mos

    predictions: dict[str, dict[str, float]] = {}
    for label, slots in sorted(loaded.items()):
        predictions[label] = {}
        for dim in dimensions:
            assessor, meta = slots[dim]
            dataset = AssessmentDataset(
                corpus,
                [image_id],
                {image_id: truth[dim]},
                meta["policy"],
                mode="eval",
                with_references=assessor.mode in ("fr", "pr"),
            )
            scores = predict_dataset(
                assessor, dataset, text_encoder=meta.get("text_encoder_module"), batch_size=1
            )
            predictions[label][dim] = float(scores[0])

    return {
        "image_id": image_id,
        "subset": record.subset,
        "generator": record.generator,
        "category": record.category,
        "text_prompt": record.text_prompt,
        "dimensions": dimensions,
        "ground_truth": truth,
        "predictions": predictions,
    }
