"""Reduction of raw evaluator ratings to per-image MOS labels.

Each image's ratings are reduced independently per dimension: mean and sample
standard deviation over all N ratings, a 95% confidence interval around the
mean, rejection of scores outside that interval, and the mean of the survivors
as the MOS. Rejection is single-pass: the interval is computed once from all
ratings and survivors are not re-screened.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from datetime import datetime, timezone
from pathlib import Path

from . import DIMENSIONS

# 95% two-sided normal quantile, fixed by the reduction procedure.
Z_95 = 1.96

SCORE_MIN = 0.0
SCORE_MAX = 5.0
SCORE_STEP = 0.01


class InsufficientRatingsError(ValueError):
    """Raised when an image has fewer than two ratings."""


class RatingValidationError(ValueError):
    """Raised for scores off the 0.01 grid, out of range, or duplicated."""


def score_on_grid(score: float) -> bool:
    """True iff score lies in [0, 5] and is a multiple of 0.01 (within float noise)."""
    if not (SCORE_MIN <= score <= SCORE_MAX):
        return False
    scaled = score / SCORE_STEP
    return abs(scaled - round(scaled)) < 1e-6


@dataclass(frozen=True)
class RatingEvent:
    """One evaluator's triple score for one image."""

    image_id: str
    evaluator_id: str
    stage: int
    quality: float
    authenticity: float
    correspondence: float
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.stage < 1:
            raise RatingValidationError(f"stage must be >= 1, got {self.stage}")
        for dim in DIMENSIONS:
            value = getattr(self, dim)
            if not score_on_grid(value):
                raise RatingValidationError(
                    f"{dim} score {value!r} is off-grid: scores lie in [0, 5] in steps of 0.01"
                )

    def score(self, dimension: str) -> float:
        return getattr(self, dimension)


@dataclass(frozen=True)
class MosLabel:
    """Per-image, per-dimension MOS with the rejection audit trail."""

    image_id: str
    dimension: str
    mean: float
    stddev: float
    epsilon: float
    kept_count: int
    discarded_ids: tuple[str, ...]
    mos: float


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def compute_mean_std(ratings: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (divisor N-1) of a rating list.

    Uses exact (fsum) summation so results do not depend on rating order.
    """
    n = len(ratings)
    if n < 2:
        raise InsufficientRatingsError(f"need at least 2 ratings, got {n}")
    mean = math.fsum(ratings) / n
    var = math.fsum((mean - r) ** 2 for r in ratings) / (n - 1)
    return mean, math.sqrt(var)


def confidence_epsilon(stddev: float, n: int) -> float:
    """Half-width of the 95% confidence interval for n ratings."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if stddev < 0:
        raise ValueError(f"stddev must be >= 0, got {stddev}")
    return Z_95 * stddev / math.sqrt(n)


def compute_mos(
    ratings: list[tuple[str, float]], image_id: str = "", dimension: str = ""
) -> MosLabel:
    """Reduce (evaluator_id, score) pairs for one image to a MOS label.

    Scores strictly outside the closed interval [mean - eps, mean + eps] are
    discarded; the MOS is the mean of the survivors. The interval is closed so
    that a zero-spread rating set keeps every score. Should every score somehow
    fall outside (impossible with a closed interval, guarded regardless), the
    MOS falls back to the mean over all ratings with nothing discarded.
    """
    scores = [s for _, s in ratings]
    mean, stddev = compute_mean_std(scores)
    eps = confidence_epsilon(stddev, len(scores))
    lo, hi = mean - eps, mean + eps
    kept = [(e, s) for e, s in ratings if lo <= s <= hi]
    discarded = tuple(sorted(e for e, s in ratings if not (lo <= s <= hi)))
    if not kept:
        kept = list(ratings)
        discarded = ()
    mos = math.fsum(s for _, s in kept) / len(kept)
    # the true mean of the kept scores lies in their range; clamping only
    # strips the final-ulp rounding of the division
    mos = min(max(mos, min(scores)), max(scores))
    return MosLabel(
        image_id=image_id,
        dimension=dimension,
        mean=mean,
        stddev=stddev,
        epsilon=eps,
        kept_count=len(kept),
        discarded_ids=discarded,
        mos=mos,
    )


def compute_all_mos(events: list[RatingEvent]) -> list[MosLabel]:
    """One MosLabel per (image, dimension) over a batch of rating events.

    Dimensions are reduced independently: an evaluator discarded on one
    dimension may survive on another. Raises if any image has fewer than two
    ratings, listing every offending image id.
    """
    by_image: dict[str, list[RatingEvent]] = {}
    for ev in events:
        by_image.setdefault(ev.image_id, []).append(ev)

    short = sorted(iid for iid, evs in by_image.items() if len(evs) < 2)
    if short:
        raise InsufficientRatingsError(
            f"images with fewer than 2 ratings: {', '.join(short)}"
        )

    labels: list[MosLabel] = []
    for image_id in sorted(by_image):
        evs = by_image[image_id]
        seen_evaluators: set[str] = set()
        for ev in evs:
            if ev.evaluator_id in seen_evaluators:
                raise RatingValidationError(
                    f"duplicate rating for image {image_id!r} by evaluator {ev.evaluator_id!r}"
                )
            seen_evaluators.add(ev.evaluator_id)
        for dim in DIMENSIONS:
            pairs = [(ev.evaluator_id, ev.score(dim)) for ev in evs]
            labels.append(compute_mos(pairs, image_id=image_id, dimension=dim))
    return labels


def write_labels(labels: list[MosLabel], path: str | Path) -> None:
    """Write labels line-delimited, plus a sidecar meta file recording the
    reduction choices (rejection scope and interval convention)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            obj = asdict(label)
            obj["discarded_ids"] = list(label.discarded_ids)
            fh.write(json.dumps(obj) + "\n")
    meta = {
        "rejection_scope": "per-image",
        "interval": "closed",
        "z_value": Z_95,
        "stddev": "sample (N-1)",
        "generated_at": now_iso(),
        "label_count": len(labels),
    }
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def read_labels(path: str | Path) -> list[MosLabel]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            obj["discarded_ids"] = tuple(obj["discarded_ids"])
            labels.append(MosLabel(**obj))
    return labels


def label_map(labels: list[MosLabel]) -> dict[tuple[str, str], MosLabel]:
    """Index labels by (image_id, dimension)."""
    return {(lb.image_id, lb.dimension): lb for lb in labels}


def write_events(events: list[RatingEvent], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(json.dumps(asdict(ev)) + "\n")


def read_events(path: str | Path) -> list[RatingEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            events.append(RatingEvent(**json.loads(line)))
    return events
