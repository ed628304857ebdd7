"""Rating-service configuration: JSON file with environment-variable overrides.

Recognized keys (env override in parentheses):
    corpus       path to the corpus manifest           (AIGIQA_CORPUS)
    store        path to the append-only rating store  (AIGIQA_STORE)
    stage_count  number of rating stages               (AIGIQA_STAGE_COUNT)
    seed         global presentation-order seed        (AIGIQA_SEED)
    host, port   listen address                        (AIGIQA_HOST, AIGIQA_PORT)
    evaluators   registered evaluator ids              (AIGIQA_EVALUATORS, comma-separated)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ServiceConfig:
    corpus: Path
    store: Path
    stage_count: int = 20
    seed: int = 0
    host: str = "127.0.0.1"
    port: int = 8700
    evaluators: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.stage_count < 1:
            raise ValueError(f"stage_count must be >= 1, got {self.stage_count}")


def load_service_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    if "AIGIQA_CORPUS" in env:
        raw["corpus"] = env["AIGIQA_CORPUS"]
    if "AIGIQA_STORE" in env:
        raw["store"] = env["AIGIQA_STORE"]
    if "AIGIQA_STAGE_COUNT" in env:
        raw["stage_count"] = int(env["AIGIQA_STAGE_COUNT"])
    if "AIGIQA_SEED" in env:
        raw["seed"] = int(env["AIGIQA_SEED"])
    if "AIGIQA_HOST" in env:
        raw["host"] = env["AIGIQA_HOST"]
    if "AIGIQA_PORT" in env:
        raw["port"] = int(env["AIGIQA_PORT"])
    if "AIGIQA_EVALUATORS" in env:
        raw["evaluators"] = [e.strip() for e in env["AIGIQA_EVALUATORS"].split(",") if e.strip()]
    missing = [k for k in ("corpus", "store") if k not in raw]
    if missing:
        raise ValueError(f"service config is missing required keys: {missing}")
    raw["corpus"] = Path(raw["corpus"])
    raw["store"] = Path(raw["store"])
    return ServiceConfig(**raw)
