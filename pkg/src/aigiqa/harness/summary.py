"""MOS distribution summaries: histograms and per-generator means."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import DIMENSIONS
from ..corpus import Corpus
from ..subjective import MosLabel

SCORE_RANGE = (0.0, 5.0)


def _hist(values: list[float], bins: int) -> dict:
    counts, edges = np.histogram(values, bins=bins, range=SCORE_RANGE)
    return {
        "count": len(values),
        "mean": float(np.mean(values)) if values else None,
        "edges": [float(e) for e in edges],
        "counts": [int(c) for c in counts],
    }


def mos_summary(labels: list[MosLabel], corpus: Corpus, bins: int = 20) -> dict:
    """Per-dimension score distributions: global, per subset, per generator."""
    out: dict = {"bins": bins, "range": list(SCORE_RANGE), "dimensions": {}}
    for dim in DIMENSIONS:
        dim_labels = [lb for lb in labels if lb.dimension == dim]
        values = [lb.mos for lb in dim_labels]
        by_subset: dict[str, list[float]] = {}
        by_generator: dict[str, list[float]] = {}
        for lb in dim_labels:
            record = corpus[lb.image_id]
            by_subset.setdefault(record.subset, []).append(lb.mos)
            by_generator.setdefault(record.generator, []).append(lb.mos)
        out["dimensions"][dim] = {
            "global": _hist(values, bins),
            "by_subset": {k: _hist(v, bins) for k, v in sorted(by_subset.items())},
            "by_generator": {k: _hist(v, bins) for k, v in sorted(by_generator.items())},
        }
    return out


def write_summary(summary: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
