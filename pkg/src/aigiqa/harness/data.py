"""Dataset bridging the corpus and the assessors.

Augmentation randomness is derived per (seed, epoch, image_id), so a sample's
crops do not depend on iteration order and runs with the same seed reproduce
bit-identical batches. Decoded source images are cached in memory; corpora
here are desk-scale.
"""

from __future__ import annotations

import random

import torch

from ..assessor.preprocess import PreprocessPolicy, load_image, preprocess
from ..corpus import Corpus


class AssessmentDataset:
    def __init__(
        self,
        corpus: Corpus,
        image_ids: list[str],
        labels: dict[str, float],
        policy: PreprocessPolicy,
        mode: str = "eval",  # preprocessing mode: train | eval
        with_references: bool = False,
        seed: int = 0,
    ):
        self.corpus = corpus
        self.image_ids = list(image_ids)
        self.labels = labels
        self.policy = policy
        self.mode = mode
        self.with_references = with_references
        self.seed = seed
        self.epoch = 0
        self._image_cache: dict = {}

    def set_epoch(self, epoch: int) -> None:
        self.epoch = epoch

    def _load(self, path):
        key = str(path)
        if key not in self._image_cache:
            self._image_cache[key] = load_image(path)
        return self._image_cache[key]

    def __len__(self) -> int:
        return len(self.image_ids)

    def __getitem__(self, idx: int) -> dict:
        image_id = self.image_ids[idx]
        record = self.corpus[image_id]
        rng = random.Random(f"{self.seed}:{self.epoch}:{image_id}")
        image = preprocess(self._load(record.image_path), self.policy, self.mode, rng)
        reference = None
        if self.with_references and record.image_prompt_path is not None:
            reference = preprocess(
                self._load(record.image_prompt_path), self.policy, self.mode, rng
            )
        return {
            "image_id": image_id,
            "image": image,
            "reference": reference,
            "label": self.labels[image_id],
            "text_prompt": record.text_prompt,
        }

    def batches(self, batch_size: int, generator: torch.Generator | None = None):
        """Yield collated batches; shuffled when a generator is supplied."""
        n = len(self)
        if generator is not None:
            order = torch.randperm(n, generator=generator).tolist()
        else:
            order = list(range(n))
        for start in range(0, n, batch_size):
            items = [self[i] for i in order[start : start + batch_size]]
            yield collate(items)


def collate(items: list[dict]) -> dict:
    return {
        "image_ids": [it["image_id"] for it in items],
        "images": torch.stack([it["image"] for it in items]),
        "references": [it["reference"] for it in items],
        "labels": torch.tensor([it["label"] for it in items], dtype=torch.float32),
        "text_prompts": [it["text_prompt"] for it in items],
    }
