"""Stage partitioning and per-evaluator presentation order.

The corpus is shuffled once under the global seed and cut into stage_count
contiguous blocks, so every evaluator rates the same pool of images per stage.
Within a stage, each evaluator sees their own seeded permutation; reopening a
session reproduces it exactly, and the cursor is recovered from the store
rather than trusted from any client.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..corpus import Corpus
from .store import RatingStore


class UnknownEvaluatorError(ValueError):
    pass


class StageRangeError(ValueError):
    pass


class OutOfOrderError(ValueError):
    """Submitted image does not match the item at the session cursor."""


@dataclass(frozen=True)
class Session:
    evaluator_id: str
    stage: int
    order: tuple[str, ...]
    cursor: int

    @property
    def complete(self) -> bool:
        return self.cursor >= len(self.order)


def partition_stages(corpus: Corpus, stage_count: int, seed: int) -> list[list[str]]:
    """Cut the seeded-shuffled corpus into stage_count contiguous blocks.

    Blocks differ in size by at most one; earlier stages absorb the remainder.
    """
    ids = sorted(r.image_id for r in corpus)
    rng = random.Random(f"{seed}:stages")
    rng.shuffle(ids)
    n = len(ids)
    base, extra = divmod(n, stage_count)
    stages: list[list[str]] = []
    start = 0
    for i in range(stage_count):
        size = base + (1 if i < extra else 0)
        stages.append(ids[start : start + size])
        start += size
    return stages


def stage_order(stage_ids: list[str], evaluator_id: str, stage: int, seed: int) -> tuple[str, ...]:
    """Deterministic permutation of one stage for one evaluator."""
    order = sorted(stage_ids)
    rng = random.Random(f"{seed}:{evaluator_id}:{stage}")
    rng.shuffle(order)
    return tuple(order)


class SessionManager:
    def __init__(self, corpus: Corpus, store: RatingStore, stage_count: int, seed: int, evaluators: list[str]):
        self.corpus = corpus
        self.store = store
        self.stage_count = stage_count
        self.seed = seed
        self.evaluators = set(evaluators)
        self.stages = partition_stages(corpus, stage_count, seed)

    def _check_evaluator(self, evaluator_id: str) -> None:
        if evaluator_id not in self.evaluators:
            raise UnknownEvaluatorError(f"evaluator {evaluator_id!r} is not registered")

    def _check_stage(self, stage: int) -> None:
        if not 1 <= stage <= self.stage_count:
            raise StageRangeError(
                f"stage {stage} out of range; configured stages are 1..{self.stage_count}"
            )

    def open_session(self, evaluator_id: str, stage: int) -> Session:
        self._check_evaluator(evaluator_id)
        self._check_stage(stage)
        order = stage_order(self.stages[stage - 1], evaluator_id, stage, self.seed)
        cursor = self.store.rated_count(evaluator_id, list(order))
        return Session(evaluator_id=evaluator_id, stage=stage, order=order, cursor=cursor)

    def progress(self, evaluator_id: str) -> list[dict]:
        self._check_evaluator(evaluator_id)
        out = []
        for i, stage_ids in enumerate(self.stages, start=1):
            rated = self.store.rated_count(evaluator_id, stage_ids)
            out.append({"stage": i, "rated": rated, "total": len(stage_ids)})
        return out
