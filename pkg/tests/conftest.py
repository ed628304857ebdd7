import json
import random

import numpy as np
import pytest
from PIL import Image

from aigiqa.corpus import ingest


def make_image(path, size=(64, 64), base=128, noise=8, seed=0):
    """Write a PNG whose mean brightness is controlled by `base`."""
    rng = np.random.default_rng(seed)
    arr = np.clip(
        rng.normal(base, noise, size=(size[1], size[0], 3)), 0, 255
    ).astype(np.uint8)
    Image.fromarray(arr).save(path)
    return path


def make_corpus_dir(
    tmp_path,
    n_per_group=4,
    generators=("genA", "genB"),
    categories=("cat",),
    i2i_generators=(),
    image_size=(64, 64),
    seed=0,
):
    """Create images plus a manifest under tmp_path and return the manifest path.

    Image brightness is drawn per image so downstream synthetic labels can be
    a simple function of pixel content.
    """
    rng = random.Random(seed)
    img_dir = tmp_path / "images"
    img_dir.mkdir(exist_ok=True)
    lines = []
    idx = 0
    for gen in generators:
        for cat in categories:
            for k in range(n_per_group):
                image_id = f"{gen}_{cat}_{k:03d}"
                base = rng.randint(30, 225)
                img_path = img_dir / f"{image_id}.png"
                make_image(img_path, size=image_size, base=base, seed=idx)
                rec = {
                    "image_id": image_id,
                    "image_path": f"images/{image_id}.png",
                    "generator": gen,
                    "category": cat,
                    "text_prompt": f"a {cat} rendered by {gen} number {k}",
                    "subset": "T2I",
                }
                if gen in i2i_generators:
                    ref_path = img_dir / f"{image_id}_ref.png"
                    make_image(ref_path, size=image_size, base=base, seed=idx + 10_000)
                    rec["subset"] = "I2I"
                    rec["image_prompt_path"] = f"images/{image_id}_ref.png"
                lines.append(json.dumps(rec))
                idx += 1
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


@pytest.fixture
def small_corpus(tmp_path):
    manifest = make_corpus_dir(tmp_path, n_per_group=4, generators=("genA", "genB"))
    return ingest(manifest)


@pytest.fixture
def mixed_corpus(tmp_path):
    """Two generators, one I2I and one T2I, four images per group."""
    manifest = make_corpus_dir(
        tmp_path,
        n_per_group=4,
        generators=("genA", "genB"),
        i2i_generators=("genB",),
    )
    return ingest(manifest)
