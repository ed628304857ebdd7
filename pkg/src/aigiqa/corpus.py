"""Corpus data model: image records, manifest ingestion, stratified splits.

A corpus is described by a line-delimited manifest (one JSON record per line)
so that large collections can be streamed. Records are validated on ingestion
and the resulting corpus handle is immutable.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from PIL import Image, UnidentifiedImageError

SUBSETS = ("T2I", "I2I")

MANIFEST_FIELDS = (
    "image_id",
    "image_path",
    "generator",
    "category",
    "text_prompt",
    "image_prompt_path",
    "subset",
)


class CorpusError(ValueError):
    """Raised when a manifest or one of its records is invalid."""


@dataclass(frozen=True)
class AigiRecord:
    """One generated image with its prompts and provenance metadata."""

    image_id: str
    image_path: Path
    generator: str
    category: str
    text_prompt: str
    subset: str
    image_prompt_path: Path | None = None

    def __post_init__(self) -> None:
        if self.subset not in SUBSETS:
            raise CorpusError(
                f"record {self.image_id!r}: subset must be one of {SUBSETS}, got {self.subset!r}"
            )
        if self.subset == "I2I" and self.image_prompt_path is None:
            raise CorpusError(
                f"record {self.image_id!r}: subset is I2I but image_prompt_path is missing"
            )
        if self.subset == "T2I" and self.image_prompt_path is not None:
            raise CorpusError(
                f"record {self.image_id!r}: subset is T2I but image_prompt_path is present"
            )

    @property
    def has_reference(self) -> bool:
        return self.image_prompt_path is not None


@dataclass(frozen=True)
class SplitAssignment:
    image_id: str
    fold: str  # "train" | "test"


@dataclass(frozen=True)
class Corpus:
    """Validated, immutable collection of records; safe to share across readers."""

    records: tuple[AigiRecord, ...]
    by_id: dict[str, AigiRecord] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.by_id:
            object.__setattr__(self, "by_id", {r.image_id: r for r in self.records})

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[AigiRecord]:
        return iter(self.records)

    def __getitem__(self, image_id: str) -> AigiRecord:
        return self.by_id[image_id]

    def groups(self) -> dict[tuple[str, str], list[AigiRecord]]:
        """Records grouped by (generator, category)."""
        out: dict[tuple[str, str], list[AigiRecord]] = {}
        for rec in self.records:
            out.setdefault((rec.generator, rec.category), []).append(rec)
        return out

    @property
    def subsets(self) -> set[str]:
        return {r.subset for r in self.records}


def _check_image(path: Path, image_id: str, role: str) -> None:
    if not path.is_file():
        raise CorpusError(f"record {image_id!r}: {role} file does not exist: {path}")
    try:
        with Image.open(path) as img:
            img.verify()
    except (UnidentifiedImageError, OSError) as exc:
        raise CorpusError(f"record {image_id!r}: {role} file does not decode: {path} ({exc})")


def parse_record(obj: dict, base_dir: Path) -> AigiRecord:
    """Build a record from one manifest entry, resolving paths against base_dir."""
    missing = [k for k in ("image_id", "image_path", "generator", "category", "text_prompt", "subset") if k not in obj]
    if missing:
        ident = obj.get("image_id", "<unknown>")
        raise CorpusError(f"record {ident!r}: missing fields {missing}")
    prompt_path = obj.get("image_prompt_path")
    return AigiRecord(
        image_id=str(obj["image_id"]),
        image_path=base_dir / str(obj["image_path"]),
        generator=str(obj["generator"]),
        category=str(obj["category"]),
        text_prompt=str(obj["text_prompt"]),
        subset=str(obj["subset"]),
        image_prompt_path=base_dir / str(prompt_path) if prompt_path else None,
    )


def ingest(manifest_path: str | Path, validate_images: bool = True) -> Corpus:
    """Read and validate a line-delimited manifest into a corpus handle.

    Relative image paths are resolved against the manifest's directory.
    With validate_images, every referenced file must exist and decode.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise CorpusError(f"manifest file does not exist: {manifest_path}")
    base_dir = manifest_path.parent

    records: list[AigiRecord] = []
    seen: set[str] = set()
    with open(manifest_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"manifest line {lineno}: invalid JSON ({exc})")
            rec = parse_record(obj, base_dir)
            if rec.image_id in seen:
                raise CorpusError(f"duplicate image_id {rec.image_id!r} (manifest line {lineno})")
            seen.add(rec.image_id)
            if validate_images:
                _check_image(rec.image_path, rec.image_id, "image")
                if rec.image_prompt_path is not None:
                    _check_image(rec.image_prompt_path, rec.image_id, "image prompt")
            records.append(rec)
    return Corpus(records=tuple(records))


def write_manifest(records: list[AigiRecord] | Corpus, path: str | Path) -> None:
    path = Path(path)
    base = path.parent
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "image_id": rec.image_id,
                "image_path": _relativize(rec.image_path, base),
                "generator": rec.generator,
                "category": rec.category,
                "text_prompt": rec.text_prompt,
                "subset": rec.subset,
            }
            if rec.image_prompt_path is not None:
                obj["image_prompt_path"] = _relativize(rec.image_prompt_path, base)
            fh.write(json.dumps(obj) + "\n")


def _relativize(path: Path, base: Path) -> str:
    try:
        return str(path.relative_to(base))
    except ValueError:
        return str(path)


def stratified_split(corpus: Corpus, ratio: float = 3.0, seed: int = 0) -> list[SplitAssignment]:
    """Assign every image to train or test, stratified by (generator, category).

    ratio is train:test, so a group of size n contributes floor(n / (1 + ratio))
    test images; the remainder trains. Exact 3:1 whenever n is a multiple of 4
    at the default ratio. Deterministic in (corpus, ratio, seed): each group is
    shuffled by its own seeded generator, independent of manifest order.
    """
    if not ratio > 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    assignments: list[SplitAssignment] = []
    for (generator, category), group in sorted(corpus.groups().items()):
        ids = sorted(rec.image_id for rec in group)
        rng = random.Random(f"{seed}:{generator}:{category}")
        rng.shuffle(ids)
        n_test = math.floor(len(ids) / (1.0 + ratio))
        test_ids = set(ids[:n_test])
        for image_id in sorted(ids):
            fold = "test" if image_id in test_ids else "train"
            assignments.append(SplitAssignment(image_id=image_id, fold=fold))
    assignments.sort(key=lambda a: a.image_id)
    return assignments


def fold_ids(assignments: list[SplitAssignment], fold: str) -> list[str]:
    return [a.image_id for a in assignments if a.fold == fold]


def write_split(assignments: list[SplitAssignment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in assignments:
            fh.write(json.dumps({"image_id": a.image_id, "fold": a.fold}) + "\n")


def read_split(path: str | Path) -> list[SplitAssignment]:
    assignments = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            assignments.append(SplitAssignment(image_id=obj["image_id"], fold=obj["fold"]))
    return assignments
