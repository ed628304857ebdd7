"""Optional on-disk cache of eval-mode features, keyed by backbone + policy.

Useful when repeatedly evaluating frozen backbones over the same corpus. The
cache refuses to serve features extracted under a different backbone or
preprocessing policy.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .preprocess import PreprocessPolicy

_META_KEY = "__meta__"


def cache_key(backbone_name: str, policy: PreprocessPolicy) -> dict:
    return {"backbone": backbone_name, "policy": asdict(policy)}


def save_cache(path: str | Path, features: dict[str, np.ndarray], key: dict) -> None:
    arrays = {iid: np.asarray(vec, dtype=np.float32) for iid, vec in features.items()}
    arrays[_META_KEY] = np.frombuffer(json.dumps(key).encode("utf-8"), dtype=np.uint8)
    np.savez(str(path), **arrays)


def load_cache(path: str | Path, key: dict) -> dict[str, np.ndarray]:
    with np.load(str(path)) as data:
        stored_key = json.loads(bytes(data[_META_KEY]).decode("utf-8"))
        if stored_key != json.loads(json.dumps(key)):
            raise ValueError(
                f"feature cache key mismatch: cache built for {stored_key}, requested {key}"
            )
        return {iid: data[iid] for iid in data.files if iid != _META_KEY}
